//! Authority reconciliation for person and place labels.

mod cache;
mod review;
mod score;
pub mod services;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::LazyLock;
use thiserror::Error;

use crate::http::HttpClient;
use crate::RateLimiter;
use crate::normalize::NormalizedEntry;
use crate::text::normalize_label;

pub use cache::{CacheRecord, DiskCache};
pub use review::{
    load_decisions, resolve_decision, review_queue, save_decisions, AuthorityIds, Choice,
    ChoiceInput, DecisionInput, PendingReview, ReviewDecision, ReviewError, ReviewMode,
};
pub use score::{levenshtein, score_candidate};
pub use services::{EntityFacts, Endpoints};

pub const DEFAULT_THRESHOLD: f64 = 0.95;
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const GEONAMES_USER_ENV: &str = "FORGEKG_GEONAMES_USER";
const ENTITY_NAMESPACE: &str = "wikidata-entity";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Service {
    Wikidata,
    #[serde(rename = "VIAF")]
    Viaf,
    GeoNames,
}

impl Service {
    pub const ALL: [Service; 3] = [Service::Wikidata, Service::Viaf, Service::GeoNames];

    /// Cache subdirectory name.
    pub fn namespace(self) -> &'static str {
        match self {
            Service::Wikidata => "wikidata",
            Service::Viaf => "viaf",
            Service::GeoNames => "geonames",
        }
    }

    pub fn supports(self, kind: EntityKind) -> bool {
        match self {
            Service::Wikidata => true,
            Service::Viaf => kind == EntityKind::Person,
            Service::GeoNames => kind == EntityKind::Place,
        }
    }
}

impl fmt::Display for Service {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Service::Wikidata => "Wikidata",
            Service::Viaf => "VIAF",
            Service::GeoNames => "GeoNames",
        })
    }
}

impl FromStr for Service {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "wikidata" => Ok(Service::Wikidata),
            "viaf" => Ok(Service::Viaf),
            "geonames" => Ok(Service::GeoNames),
            other => Err(format!("unknown service `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Person,
    Place,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Person => "Person",
            EntityKind::Place => "Place",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorityCandidate {
    pub service: Service,
    pub external_id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchStatus {
    AutoMatched,
    Reviewed,
    Unmatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifeYears {
    pub birth: i32,
    pub death: i32,
}

impl LifeYears {
    pub fn new(birth: i32, death: i32) -> Option<Self> {
        (birth <= death).then_some(Self { birth, death })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconciledEntity {
    pub raw_label: String,
    pub kind: EntityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wikidata_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viaf_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geonames_id: Option<String>,
    pub canonical_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub life_years: Option<LifeYears>,
    pub status: MatchStatus,
}

impl ReconciledEntity {
    pub fn unmatched(raw_label: &str, kind: EntityKind) -> Self {
        Self {
            raw_label: raw_label.to_string(),
            kind,
            wikidata_id: None,
            viaf_id: None,
            geonames_id: None,
            canonical_label: raw_label.trim().to_string(),
            life_years: None,
            status: MatchStatus::Unmatched,
        }
    }

    pub fn has_authority_id(&self) -> bool {
        self.wikidata_id.is_some() || self.viaf_id.is_some() || self.geonames_id.is_some()
    }
}

/// Picks the top candidate when it clears `threshold` and leads the
/// runner-up by at least [`DEFAULT_MARGIN`].
pub fn auto_match(
    candidates: &[AuthorityCandidate],
    threshold: f64,
) -> (Option<AuthorityCandidate>, bool) {
    auto_match_with_margin(candidates, threshold, DEFAULT_MARGIN)
}

pub fn auto_match_with_margin(
    candidates: &[AuthorityCandidate],
    threshold: f64,
    margin: f64,
) -> (Option<AuthorityCandidate>, bool) {
    let mut sorted: Vec<&AuthorityCandidate> = candidates.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));
    let Some(top) = sorted.first() else {
        return (None, false);
    };
    let runner_up = sorted.get(1).map_or(0.0, |c| c.score);
    // tolerance absorbs binary rounding in the subtraction only
    if top.score >= threshold && top.score - runner_up >= margin - 1e-9 {
        (Some((*top).clone()), false)
    } else {
        (None, true)
    }
}

#[derive(Debug, Error)]
pub enum ReconcileError {
    #[error("empty label")]
    EmptyLabel,
    #[error("{service} cannot resolve a {kind}")]
    IncompatibleKind { service: Service, kind: EntityKind },
    #[error("malformed Wikidata id `{0}` (expected Q followed by digits)")]
    MalformedId(String),
    #[error("{service} request failed: {message}")]
    Network { service: Service, message: String },
    #[error("{service} rate limit still exceeded after {attempts} attempts")]
    RateLimited { service: Service, attempts: u32 },
    #[error("{service} returned HTTP {status}")]
    Status { service: Service, status: u16 },
    #[error("{service} payload unreadable: {message}")]
    Payload { service: Service, message: String },
    #[error("offline and no cached {service} response for `{query}`")]
    Offline { service: Service, query: String },
    #[error("{0} is required for GeoNames lookups")]
    MissingCredential(&'static str),
    #[error("cache error: {0}")]
    Cache(#[from] std::io::Error),
    #[error(transparent)]
    Review(#[from] ReviewError),
}

/// Requests per second for each service; zero or less disables limiting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RateLimits {
    pub wikidata: f64,
    pub viaf: f64,
    pub geonames: f64,
}

impl Default for RateLimits {
    fn default() -> Self {
        Self {
            wikidata: 1.0,
            viaf: 1.0,
            geonames: 1.0,
        }
    }
}

impl RateLimits {
    pub fn unlimited() -> Self {
        Self {
            wikidata: 0.0,
            viaf: 0.0,
            geonames: 0.0,
        }
    }

    pub fn get(&self, service: Service) -> f64 {
        match service {
            Service::Wikidata => self.wikidata,
            Service::Viaf => self.viaf,
            Service::GeoNames => self.geonames,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconcileSettings {
    pub threshold: f64,
    pub margin: f64,
    pub rate_limits: RateLimits,
    /// Retries after HTTP 429 before giving up.
    pub max_retries: u32,
    pub geonames_user: Option<String>,
    pub endpoints: Endpoints,
}

impl Default for ReconcileSettings {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            margin: DEFAULT_MARGIN,
            rate_limits: RateLimits::default(),
            max_retries: 3,
            geonames_user: std::env::var(GEONAMES_USER_ENV).ok().filter(|s| !s.is_empty()),
            endpoints: Endpoints::default(),
        }
    }
}

/// Outcome for one label: the entity plus, when ambiguous, the review item.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub entity: ReconciledEntity,
    pub pending: Option<PendingReview>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReconcileReport {
    pub entities: Vec<ReconciledEntity>,
    pub pending: Vec<PendingReview>,
}

impl ReconcileReport {
    pub fn lookup(&self, kind: EntityKind, raw_label: &str) -> Option<&ReconciledEntity> {
        let key = normalize_label(raw_label);
        self.entities
            .iter()
            .find(|e| e.kind == kind && normalize_label(&e.raw_label) == key)
    }

    /// `(birth, death)` for every person with known life dates, keyed by normalized label.
    pub fn life_dates(&self) -> HashMap<String, LifeYears> {
        self.entities
            .iter()
            .filter_map(|e| Some((normalize_label(&e.raw_label), e.life_years?)))
            .collect()
    }
}

/// Distinct `(label, kind)` pairs mentioned by normalized entries, in first-seen order.
pub fn reconcile_targets(entries: &[NormalizedEntry]) -> Vec<(String, EntityKind)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut push = |label: &str, kind: EntityKind| {
        let key = normalize_label(label);
        if !key.is_empty() && seen.insert((key, kind)) {
            out.push((label.trim().to_string(), kind));
        }
    };
    for entry in entries {
        if let Some(author) = &entry.metadata.alleged_author_raw {
            push(author, EntityKind::Person);
        }
        if let Some(place) = &entry.metadata.alleged_place_raw {
            push(place, EntityKind::Place);
        }
        for claim in &entry.claims {
            push(&claim.claimant_raw, EntityKind::Person);
        }
    }
    out
}

static QID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^Q[1-9][0-9]*$").unwrap());

fn cache_key(label: &str) -> String {
    label
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Authority client with a mandatory disk cache. Without an HTTP client it
/// runs offline and treats a cache miss as an error.
pub struct Reconciler {
    settings: ReconcileSettings,
    cache: DiskCache,
    http: Option<Arc<dyn HttpClient>>,
    limiters: HashMap<Service, RateLimiter>,
}

impl Reconciler {
    pub fn new(
        settings: ReconcileSettings,
        cache: DiskCache,
        http: Option<Arc<dyn HttpClient>>,
    ) -> Self {
        let limiters = Service::ALL
            .into_iter()
            .map(|s| (s, RateLimiter::per_second(settings.rate_limits.get(s))))
            .collect();
        Self {
            settings,
            cache,
            http,
            limiters,
        }
    }

    pub fn settings(&self) -> &ReconcileSettings {
        &self.settings
    }

    pub fn cache(&self) -> &DiskCache {
        &self.cache
    }

    fn fetch_json(
        &self,
        service: Service,
        namespace: &str,
        query: &str,
        url: impl FnOnce() -> Result<String, ReconcileError>,
        check: impl Fn(&Value) -> Result<(), String>,
    ) -> Result<Value, ReconcileError> {
        if let Some(record) = self.cache.get(namespace, query)? {
            return Ok(record.response);
        }
        let Some(http) = &self.http else {
            return Err(ReconcileError::Offline {
                service,
                query: query.to_string(),
            });
        };
        let url = url()?;
        let limiter = &self.limiters[&service];
        let mut attempts = 0;
        let response = loop {
            attempts += 1;
            let response = limiter
                .throttle(|| http.get(&url))
                .map_err(|e| ReconcileError::Network {
                    service,
                    message: e.to_string(),
                })?;
            if response.status != 429 {
                break response;
            }
            if attempts > self.settings.max_retries {
                return Err(ReconcileError::RateLimited { service, attempts });
            }
            std::thread::sleep(response.retry_after.unwrap_or(Duration::from_secs(1)));
        };
        if !response.is_success() {
            return Err(ReconcileError::Status {
                service,
                status: response.status,
            });
        }
        let payload: Value =
            serde_json::from_str(&response.body).map_err(|e| ReconcileError::Payload {
                service,
                message: e.to_string(),
            })?;
        check(&payload).map_err(|message| ReconcileError::Payload { service, message })?;
        self.cache.put(namespace, query, &payload)?;
        Ok(payload)
    }

    /// Up to ten scored candidates from `service`, best first.
    pub fn search_authority(
        &self,
        service: Service,
        label: &str,
        kind: EntityKind,
    ) -> Result<Vec<AuthorityCandidate>, ReconcileError> {
        if label.trim().is_empty() {
            return Err(ReconcileError::EmptyLabel);
        }
        if !service.supports(kind) {
            return Err(ReconcileError::IncompatibleKind { service, kind });
        }
        let query = cache_key(label);
        let parse = |payload: &Value| services::parse_search(service, kind, label, payload);
        let payload = self.fetch_json(
            service,
            service.namespace(),
            &query,
            || {
                let user = match service {
                    Service::GeoNames => Some(
                        self.settings
                            .geonames_user
                            .as_deref()
                            .ok_or(ReconcileError::MissingCredential(GEONAMES_USER_ENV))?,
                    ),
                    _ => None,
                };
                self.settings
                    .endpoints
                    .search_url(service, label.trim(), user)
                    .map_err(|e| ReconcileError::Network {
                        service,
                        message: e.to_string(),
                    })
            },
            |payload| parse(payload).map(|_| ()),
        )?;
        parse(&payload).map_err(|message| ReconcileError::Payload { service, message })
    }

    pub fn entity_facts(&self, wikidata_id: &str) -> Result<EntityFacts, ReconcileError> {
        if !QID.is_match(wikidata_id) {
            return Err(ReconcileError::MalformedId(wikidata_id.to_string()));
        }
        let payload = self.fetch_json(
            Service::Wikidata,
            ENTITY_NAMESPACE,
            wikidata_id,
            || Ok(self.settings.endpoints.entity_url(wikidata_id)),
            |payload| services::parse_entity(wikidata_id, payload).map(|_| ()),
        )?;
        services::parse_entity(wikidata_id, &payload).map_err(|message| ReconcileError::Payload {
            service: Service::Wikidata,
            message,
        })
    }

    /// Birth and death years from the entity, absent unless both are present.
    pub fn fetch_life_dates(&self, wikidata_id: &str) -> Result<Option<(i32, i32)>, ReconcileError> {
        let facts = self.entity_facts(wikidata_id)?;
        Ok(facts.birth_year.zip(facts.death_year))
    }

    fn person_entity(
        &self,
        raw_label: &str,
        chosen: &AuthorityCandidate,
        status: MatchStatus,
    ) -> Result<ReconciledEntity, ReconcileError> {
        let facts = self.entity_facts(&chosen.external_id)?;
        let viaf_id = match facts.viaf_id.clone() {
            Some(id) => Some(id),
            None => {
                let candidates = self.search_authority(Service::Viaf, raw_label, EntityKind::Person)?;
                auto_match_with_margin(&candidates, self.settings.threshold, self.settings.margin)
                    .0
                    .map(|c| c.external_id)
            }
        };
        Ok(ReconciledEntity {
            raw_label: raw_label.to_string(),
            kind: EntityKind::Person,
            wikidata_id: Some(chosen.external_id.clone()),
            viaf_id,
            geonames_id: None,
            canonical_label: facts.label.clone().unwrap_or_else(|| chosen.label.clone()),
            life_years: facts
                .birth_year
                .zip(facts.death_year)
                .and_then(|(b, d)| LifeYears::new(b, d)),
            status,
        })
    }

    fn place_entity(raw_label: &str, chosen: &AuthorityCandidate, status: MatchStatus) -> ReconciledEntity {
        ReconciledEntity {
            raw_label: raw_label.to_string(),
            kind: EntityKind::Place,
            wikidata_id: None,
            viaf_id: None,
            geonames_id: Some(chosen.external_id.clone()),
            canonical_label: chosen.label.clone(),
            life_years: None,
            status,
        }
    }

    /// Resolves one label. Auto-matching wins over `decision`; a decision is
    /// only consulted when the candidates are ambiguous.
    pub fn reconcile(
        &self,
        raw_label: &str,
        kind: EntityKind,
        decision: Option<&ReviewDecision>,
    ) -> Result<Resolution, ReconcileError> {
        let service = match kind {
            EntityKind::Person => Service::Wikidata,
            EntityKind::Place => Service::GeoNames,
        };
        let candidates = self.search_authority(service, raw_label, kind)?;
        let (matched, needs_review) =
            auto_match_with_margin(&candidates, self.settings.threshold, self.settings.margin);
        let build = |chosen: &AuthorityCandidate, status| match kind {
            EntityKind::Person => self.person_entity(raw_label, chosen, status),
            EntityKind::Place => Ok(Self::place_entity(raw_label, chosen, status)),
        };
        if let Some(chosen) = matched {
            return Ok(Resolution {
                entity: build(&chosen, MatchStatus::AutoMatched)?,
                pending: None,
            });
        }
        if !needs_review {
            return Ok(Resolution {
                entity: ReconciledEntity::unmatched(raw_label, kind),
                pending: None,
            });
        }
        let pending = PendingReview {
            raw_label: raw_label.to_string(),
            kind,
            candidates,
        };
        match decision {
            Some(decision) => {
                let entity = match pending.chosen_candidate(decision)? {
                    Some(chosen) => build(chosen, MatchStatus::Reviewed)?,
                    None => ReconciledEntity::unmatched(raw_label, kind),
                };
                Ok(Resolution {
                    entity,
                    pending: None,
                })
            }
            None => Ok(Resolution {
                entity: ReconciledEntity::unmatched(raw_label, kind),
                pending: Some(pending),
            }),
        }
    }

    /// Resolves every target in order, applying matching review decisions.
    pub fn reconcile_all(
        &self,
        targets: &[(String, EntityKind)],
        decisions: &[ReviewDecision],
    ) -> Result<ReconcileReport, ReconcileError> {
        let mut report = ReconcileReport::default();
        for (label, kind) in targets {
            let key = normalize_label(label);
            let decision = decisions
                .iter()
                .rev()
                .find(|d| d.kind == *kind && normalize_label(&d.raw_label) == key);
            let resolution = self.reconcile(label, *kind, decision)?;
            report.entities.push(resolution.entity);
            report.pending.extend(resolution.pending);
        }
        Ok(report)
    }
}
