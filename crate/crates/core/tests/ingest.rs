mod support;

use std::collections::HashMap;
use std::fs;
use std::sync::Arc;

use forgekg::corpus::{select_sections_for_entry, ArticleFetcher, FetchError, DEFAULT_SECTION_KEYWORDS};
use forgekg::http::HttpResponse;
use support::{fixtures, CountingHttp};

fn fetcher(body: &str) -> (Arc<CountingHttp>, ArticleFetcher) {
    let http = Arc::new(CountingHttp::with_routes(HashMap::from([(
        "Vinland+Map",
        HttpResponse::ok(body),
    )])));
    let f = ArticleFetcher::new(http.clone(), "https://en.wikipedia.org/w/api.php");
    (http, f)
}

#[test]
fn fetches_and_selects_debate_section() {
    let body = fs::read_to_string(fixtures().join("wiki/vinland_map.json")).unwrap();
    let (http, f) = fetcher(&body);
    let article = f.fetch_article("https://en.wikipedia.org/wiki/Vinland_Map").unwrap();
    assert_eq!(http.calls(), 1);
    assert_eq!(article.title, "Vinland Map");
    let headings: Vec<&str> = article.sections.iter().map(|s| s.heading.as_str()).collect();
    assert_eq!(headings, ["History", "Authenticity debate", "Dating"]);

    let picked = select_sections_for_entry(&article.sections, DEFAULT_SECTION_KEYWORDS, None);
    assert_eq!(picked.len(), 1);
    assert_eq!(
        picked[0].body,
        "Kirsten Seaver argued that the map is a modern forgery. Rene Larsen maintained that the ink was genuine."
    );

    let manual = vec!["dating".to_string()];
    let picked = select_sections_for_entry(&article.sections, DEFAULT_SECTION_KEYWORDS, Some(&manual));
    assert_eq!(picked[0].heading, "Dating");
}

#[test]
fn missing_article_is_not_found() {
    let (_, f) = fetcher("{}");
    let err = f.fetch_article("https://en.wikipedia.org/wiki/Nowhere").unwrap_err();
    assert!(matches!(err, FetchError::NotFound { .. }), "{err}");
}
