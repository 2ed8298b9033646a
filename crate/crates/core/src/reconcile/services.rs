//! Request URLs and payload readers for the three authority services.

use serde_json::Value;
use url::Url;

use super::{AuthorityCandidate, EntityKind, Service};
use crate::reconcile::score::score_candidate;

pub const WIKIDATA_API: &str = "https://www.wikidata.org/w/api.php";
pub const WIKIDATA_ENTITY_DATA: &str = "https://www.wikidata.org/wiki/Special:EntityData";
pub const VIAF_AUTOSUGGEST: &str = "https://viaf.org/viaf/AutoSuggest";
pub const GEONAMES_SEARCH: &str = "http://api.geonames.org/searchJSON";

/// Upper bound on candidates kept per search.
pub const MAX_CANDIDATES: usize = 10;

/// Base URLs, overridable for tests and mirrors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoints {
    pub wikidata_api: String,
    pub wikidata_entity_data: String,
    pub viaf_autosuggest: String,
    pub geonames_search: String,
}

impl Default for Endpoints {
    fn default() -> Self {
        Self {
            wikidata_api: WIKIDATA_API.into(),
            wikidata_entity_data: WIKIDATA_ENTITY_DATA.into(),
            viaf_autosuggest: VIAF_AUTOSUGGEST.into(),
            geonames_search: GEONAMES_SEARCH.into(),
        }
    }
}

impl Endpoints {
    pub fn search_url(
        &self,
        service: Service,
        label: &str,
        geonames_user: Option<&str>,
    ) -> Result<String, url::ParseError> {
        let url = match service {
            Service::Wikidata => Url::parse_with_params(
                &self.wikidata_api,
                [
                    ("action", "wbsearchentities"),
                    ("search", label),
                    ("language", "en"),
                    ("uselang", "en"),
                    ("type", "item"),
                    ("limit", "10"),
                    ("format", "json"),
                ],
            )?,
            Service::Viaf => Url::parse_with_params(&self.viaf_autosuggest, [("query", label)])?,
            Service::GeoNames => Url::parse_with_params(
                &self.geonames_search,
                [
                    ("q", label),
                    ("maxRows", "10"),
                    ("style", "MEDIUM"),
                    ("username", geonames_user.unwrap_or_default()),
                ],
            )?,
        };
        Ok(url.into())
    }

    pub fn entity_url(&self, qid: &str) -> String {
        format!("{}/{qid}.json", self.wikidata_entity_data.trim_end_matches('/'))
    }
}

fn str_field<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key).and_then(Value::as_str).filter(|s| !s.trim().is_empty())
}

/// Reads a search payload into scored candidates, best first.
pub fn parse_search(
    service: Service,
    kind: EntityKind,
    raw_label: &str,
    payload: &Value,
) -> Result<Vec<AuthorityCandidate>, String> {
    let mut out = match service {
        Service::Wikidata => parse_wikidata_search(raw_label, payload)?,
        Service::Viaf => parse_viaf(raw_label, kind, payload)?,
        Service::GeoNames => parse_geonames(raw_label, payload)?,
    };
    // stable sort keeps the service's own ranking among ties
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    out.truncate(MAX_CANDIDATES);
    Ok(out)
}

fn parse_wikidata_search(raw_label: &str, payload: &Value) -> Result<Vec<AuthorityCandidate>, String> {
    if let Some(err) = payload.get("error") {
        return Err(format!("wikidata error: {err}"));
    }
    let items = payload
        .get("search")
        .and_then(Value::as_array)
        .ok_or("wikidata search payload lacks a `search` array")?;
    Ok(items
        .iter()
        .filter_map(|item| {
            let id = str_field(item, "id")?;
            let label = str_field(item, "label")
                .or_else(|| item.pointer("/display/label/value").and_then(Value::as_str))
                .unwrap_or(id);
            let mut score = score_candidate(raw_label, label);
            // aliases are reported as the matched text
            if let Some(text) = item.pointer("/match/text").and_then(Value::as_str) {
                score = score.max(score_candidate(raw_label, text));
            }
            Some(AuthorityCandidate {
                service: Service::Wikidata,
                external_id: id.to_string(),
                label: label.to_string(),
                description: str_field(item, "description").map(str::to_string),
                score,
            })
        })
        .collect())
}

/// Turns a VIAF heading such as `"Valla, Lorenzo, 1407-1457"` into `"Lorenzo Valla"`.
pub fn viaf_display_label(heading: &str) -> String {
    let parts: Vec<&str> = heading
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .filter(|p| !p.chars().any(|c| c.is_ascii_digit()))
        .collect();
    match parts.as_slice() {
        [] => heading.trim().to_string(),
        [single] => single.trim_end_matches('.').to_string(),
        [last, first, ..] => format!("{} {}", first.trim_end_matches('.'), last),
    }
}

fn parse_viaf(raw_label: &str, kind: EntityKind, payload: &Value) -> Result<Vec<AuthorityCandidate>, String> {
    let items = match payload.get("result") {
        Some(Value::Array(items)) => items.as_slice(),
        Some(Value::Null) | None if payload.get("query").is_some() => &[],
        _ => return Err("VIAF payload lacks a `result` array".into()),
    };
    Ok(items
        .iter()
        .filter(|item| match (kind, str_field(item, "nametype")) {
            (EntityKind::Person, Some(t)) => t == "personal",
            _ => true,
        })
        .filter_map(|item| {
            let id = match item.get("viafid")? {
                Value::String(s) if !s.trim().is_empty() => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return None,
            };
            let heading = str_field(item, "displayForm").or_else(|| str_field(item, "term"))?;
            let label = viaf_display_label(heading);
            Some(AuthorityCandidate {
                service: Service::Viaf,
                external_id: id,
                score: score_candidate(raw_label, &label),
                label,
                description: Some(heading.to_string()),
            })
        })
        .collect())
}

fn parse_geonames(raw_label: &str, payload: &Value) -> Result<Vec<AuthorityCandidate>, String> {
    if let Some(status) = payload.get("status") {
        return Err(format!("geonames error: {status}"));
    }
    let items = payload
        .get("geonames")
        .and_then(Value::as_array)
        .ok_or("geonames payload lacks a `geonames` array")?;
    Ok(items
        .iter()
        .filter_map(|item| {
            let id = match item.get("geonameId")? {
                Value::Number(n) => n.to_string(),
                Value::String(s) if !s.is_empty() => s.clone(),
                _ => return None,
            };
            let label = str_field(item, "name").or_else(|| str_field(item, "toponymName"))?;
            let description = [str_field(item, "fcodeName"), str_field(item, "countryName")]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join(", ");
            Some(AuthorityCandidate {
                service: Service::GeoNames,
                external_id: id,
                label: label.to_string(),
                description: (!description.is_empty()).then_some(description),
                score: score_candidate(raw_label, label),
            })
        })
        .collect())
}

/// Facts read from a Wikidata entity payload.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityFacts {
    pub label: Option<String>,
    pub birth_year: Option<i32>,
    pub death_year: Option<i32>,
    pub viaf_id: Option<String>,
}

/// Parses the signed year out of a Wikidata time value like `+1407-00-00T00:00:00Z`.
pub fn wikidata_year(time: &str) -> Option<i32> {
    let (negative, rest) = match time.as_bytes().first()? {
        b'-' => (true, &time[1..]),
        b'+' => (false, &time[1..]),
        _ => (false, time),
    };
    let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
    let year: i32 = digits.parse().ok()?;
    Some(if negative { -year } else { year })
}

fn claim_values<'a>(entity: &'a Value, property: &str) -> impl Iterator<Item = &'a Value> {
    let claims = entity
        .pointer(&format!("/claims/{property}"))
        .and_then(Value::as_array)
        .map(Vec::as_slice)
        .unwrap_or_default();
    let preferred = claims
        .iter()
        .filter(|c| c.get("rank").and_then(Value::as_str) == Some("preferred"));
    let normal = claims
        .iter()
        .filter(|c| c.get("rank").and_then(Value::as_str) != Some("deprecated"));
    preferred
        .chain(normal)
        .filter_map(|c| c.pointer("/mainsnak/datavalue/value"))
}

pub fn parse_entity(qid: &str, payload: &Value) -> Result<EntityFacts, String> {
    let entities = payload
        .get("entities")
        .and_then(Value::as_object)
        .ok_or("entity payload lacks `entities`")?;
    // redirected ids come back under their target key
    let entity = entities
        .get(qid)
        .or_else(|| entities.values().next())
        .ok_or_else(|| format!("entity payload has no entry for {qid}"))?;
    let label = entity
        .pointer("/labels/en/value")
        .and_then(Value::as_str)
        .map(str::to_string);
    let year = |prop: &str| {
        claim_values(entity, prop)
            .filter_map(|v| v.get("time").and_then(Value::as_str))
            .find_map(wikidata_year)
    };
    let viaf_id = claim_values(entity, "P214")
        .find_map(Value::as_str)
        .map(str::to_string);
    Ok(EntityFacts {
        label,
        birth_year: year("P569"),
        death_year: year("P570"),
        viaf_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn viaf_headings() {
        assert_eq!(viaf_display_label("Valla, Lorenzo, 1407-1457"), "Lorenzo Valla");
        assert_eq!(viaf_display_label("Petrarca, Francesco, 1304-1374."), "Francesco Petrarca");
        assert_eq!(viaf_display_label("Nicolaus Cusanus"), "Nicolaus Cusanus");
    }

    #[test]
    fn wikidata_years() {
        assert_eq!(wikidata_year("+1407-00-00T00:00:00Z"), Some(1407));
        assert_eq!(wikidata_year("-0063-09-23T00:00:00Z"), Some(-63));
        assert_eq!(wikidata_year("garbage"), None);
    }

    #[test]
    fn search_urls_are_encoded() {
        let e = Endpoints::default();
        let url = e.search_url(Service::Wikidata, "Lorenzo Valla", None).unwrap();
        assert!(url.contains("search=Lorenzo+Valla"));
        let url = e.search_url(Service::GeoNames, "Rome", Some("demo")).unwrap();
        assert!(url.contains("username=demo"));
        assert_eq!(e.entity_url("Q1"), format!("{WIKIDATA_ENTITY_DATA}/Q1.json"));
    }

    #[test]
    fn wikidata_search_scores_aliases() {
        let payload = json!({"search": [
            {"id": "Q2", "label": "Laurentius Valla", "match": {"type": "alias", "text": "Lorenzo Valla"}},
            {"id": "Q3", "label": "Valla"}
        ]});
        let c = parse_search(Service::Wikidata, EntityKind::Person, "Lorenzo Valla", &payload).unwrap();
        assert_eq!(c[0].external_id, "Q2");
        assert_eq!(c[0].score, 1.0);
        assert!(parse_search(Service::Wikidata, EntityKind::Person, "x", &json!({})).is_err());
    }

    #[test]
    fn entity_facts_skip_deprecated() {
        let payload = json!({"entities": {"Q9": {
            "labels": {"en": {"value": "Someone"}},
            "claims": {
                "P569": [
                    {"rank": "deprecated", "mainsnak": {"datavalue": {"value": {"time": "+1400-00-00T00:00:00Z"}}}},
                    {"rank": "normal", "mainsnak": {"datavalue": {"value": {"time": "+1407-00-00T00:00:00Z"}}}}
                ],
                "P214": [{"rank": "normal", "mainsnak": {"datavalue": {"value": "123"}}}]
            }
        }}});
        let f = parse_entity("Q9", &payload).unwrap();
        assert_eq!(f.birth_year, Some(1407));
        assert_eq!(f.death_year, None);
        assert_eq!(f.viaf_id.as_deref(), Some("123"));
        assert_eq!(f.label.as_deref(), Some("Someone"));
    }

    #[test]
    fn geonames_error_status() {
        let payload = json!({"status": {"message": "user does not exist.", "value": 10}});
        assert!(parse_search(Service::GeoNames, EntityKind::Place, "Rome", &payload).is_err());
    }
}
