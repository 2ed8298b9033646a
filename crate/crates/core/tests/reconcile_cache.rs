mod support;

use std::collections::HashMap;
use std::fs;
use std::sync::Arc;

use forgekg::http::HttpResponse;
use forgekg::reconcile::{
    DiskCache, EntityKind, MatchStatus, RateLimits, ReconcileError, ReconcileSettings, Reconciler,
    Service,
};
use serde_json::json;
use support::{fixtures, CountingHttp};

fn settings() -> ReconcileSettings {
    ReconcileSettings {
        rate_limits: RateLimits::unlimited(),
        geonames_user: Some("tester".into()),
        ..ReconcileSettings::default()
    }
}

fn copy_dir(from: &std::path::Path, to: &std::path::Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

fn warm_cache() -> (tempfile::TempDir, DiskCache) {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixtures().join("cache"), dir.path());
    let cache = DiskCache::new(dir.path());
    (dir, cache)
}

#[test]
fn warm_cache_makes_no_requests() {
    let (_dir, cache) = warm_cache();
    let http = Arc::new(CountingHttp::default());
    let r = Reconciler::new(settings(), cache, Some(http.clone()));
    let targets = [
        ("Lorenzo Valla", EntityKind::Person),
        ("Nicholas of Cusa", EntityKind::Person),
        ("Reginald Pecock", EntityKind::Person),
        ("Rene Larsen", EntityKind::Person),
        ("Basel", EntityKind::Place),
        ("Rome", EntityKind::Place),
    ];
    for (label, kind) in targets {
        r.reconcile(label, kind, None).unwrap();
    }
    assert_eq!(http.calls(), 0);
}

#[test]
fn valla_search_and_life_dates_from_fixture() {
    let (_dir, cache) = warm_cache();
    let r = Reconciler::new(settings(), cache, None);
    let cands = r
        .search_authority(Service::Wikidata, "Lorenzo Valla", EntityKind::Person)
        .unwrap();
    assert_eq!(cands[0].external_id, "Q202370");
    assert_eq!(cands[0].score, 1.0);
    assert!(cands.windows(2).all(|w| w[0].score >= w[1].score));
    assert_eq!(r.fetch_life_dates("Q202370").unwrap(), Some((1407, 1457)));
    // still living: no death year, so no pair
    assert_eq!(r.fetch_life_dates("Q900003").unwrap(), None);
}

#[test]
fn ambiguous_label_waits_for_review() {
    let (_dir, cache) = warm_cache();
    let r = Reconciler::new(settings(), cache, None);
    let res = r.reconcile("Reginald Pecock", EntityKind::Person, None).unwrap();
    assert_eq!(res.entity.status, MatchStatus::Unmatched);
    let pending = res.pending.unwrap();
    assert_eq!(pending.candidates.len(), 2);

    let res = r.reconcile("Lorenzo Valla", EntityKind::Person, None).unwrap();
    assert_eq!(res.entity.status, MatchStatus::AutoMatched);
    assert_eq!(res.entity.viaf_id.as_deref(), Some("71390303"));
    assert!(res.pending.is_none());
}

#[test]
fn offline_miss_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = Reconciler::new(settings(), DiskCache::new(dir.path()), None);
    let err = r
        .search_authority(Service::Wikidata, "Lorenzo Valla", EntityKind::Person)
        .unwrap_err();
    assert!(matches!(err, ReconcileError::Offline { .. }));
}

#[test]
fn cold_cache_fetches_once_then_replays() {
    let dir = tempfile::tempdir().unwrap();
    let search = json!({"search": [{"id": "Q202370", "label": "Lorenzo Valla"}]});
    let entity = json!({"entities": {"Q202370": {
        "labels": {"en": {"value": "Lorenzo Valla"}},
        "claims": {
            "P569": [{"rank": "normal", "mainsnak": {"datavalue": {"value": {"time": "+1407-00-00T00:00:00Z"}}}}],
            "P570": [{"rank": "normal", "mainsnak": {"datavalue": {"value": {"time": "+1457-00-00T00:00:00Z"}}}}],
            "P214": [{"rank": "normal", "mainsnak": {"datavalue": {"value": "71390303"}}}]
        }
    }}});
    let http = Arc::new(CountingHttp::with_routes(HashMap::from([
        ("wbsearchentities", HttpResponse::ok(search.to_string())),
        ("Q202370.json", HttpResponse::ok(entity.to_string())),
    ])));
    let r = Reconciler::new(settings(), DiskCache::new(dir.path()), Some(http.clone()));
    let first = r.reconcile("Lorenzo Valla", EntityKind::Person, None).unwrap();
    assert_eq!(http.calls(), 2);
    let again = r.reconcile("  lorenzo   VALLA ", EntityKind::Person, None).unwrap();
    assert_eq!(http.calls(), 2);
    assert_eq!(first.entity.wikidata_id, again.entity.wikidata_id);
    assert_eq!(r.cache().entries("wikidata").unwrap().len(), 1);
}

#[test]
fn rate_limited_responses_are_retried() {
    let dir = tempfile::tempdir().unwrap();
    let mut busy = HttpResponse::with_status(429, "");
    busy.retry_after = Some(std::time::Duration::from_millis(1));
    let http = Arc::new(CountingHttp::with_routes(HashMap::from([("geonames", busy)])));
    let r = Reconciler::new(settings(), DiskCache::new(dir.path()), Some(http.clone()));
    let err = r.search_authority(Service::GeoNames, "Basel", EntityKind::Place).unwrap_err();
    assert!(matches!(err, ReconcileError::RateLimited { attempts: 4, .. }), "{err}");
    assert_eq!(http.calls(), 4);
}
