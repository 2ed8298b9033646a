//! Historical date strings to inclusive signed-year intervals.
//!
//! Years BCE are negative (`300 BC` is `-300`); there is no year 0 in input.
//! The nth century CE spans `[(n-1)*100, n*100 - 1]`, so the 4th century is
//! `[300, 399]`; the nth century BCE mirrors it as `[-n*100, -((n-1)*100 + 1)]`.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Half-width of the window applied to "circa" dates.
pub const CIRCA_WINDOW: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct YearInterval {
    start_year: i32,
    end_year: i32,
}

#[derive(Deserialize)]
struct RawInterval {
    start_year: i32,
    end_year: i32,
}

impl TryFrom<RawInterval> for YearInterval {
    type Error = String;

    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        YearInterval::new(raw.start_year, raw.end_year)
            .ok_or_else(|| format!("start_year {} > end_year {}", raw.start_year, raw.end_year))
    }
}

impl YearInterval {
    pub fn new(start_year: i32, end_year: i32) -> Option<Self> {
        (start_year <= end_year).then_some(Self {
            start_year,
            end_year,
        })
    }

    pub fn year(year: i32) -> Self {
        Self {
            start_year: year,
            end_year: year,
        }
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.end_year
    }

    /// `floor((start + end) / 2)`.
    pub fn midpoint(&self) -> i32 {
        ((self.start_year as i64 + self.end_year as i64).div_euclid(2)) as i32
    }

    fn widen(self, by: i32) -> Self {
        Self {
            start_year: self.start_year - by,
            end_year: self.end_year + by,
        }
    }

    fn hull(self, other: Self) -> Self {
        Self {
            start_year: self.start_year.min(other.start_year),
            end_year: self.end_year.max(other.end_year),
        }
    }
}

impl fmt::Display for YearInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start_year, self.end_year)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized date {raw:?}")]
pub struct DateError {
    pub raw: String,
}

/// Interval of the nth century; negative `n` counts centuries BCE.
pub fn century_interval(n: i32) -> Option<YearInterval> {
    match n {
        0 => None,
        n if n > 0 => YearInterval::new((n - 1) * 100, n * 100 - 1),
        n => {
            let m = -n;
            YearInterval::new(-(m * 100), -((m - 1) * 100 + 1))
        }
    }
}

/// Century containing `year` under the same convention as [`century_interval`].
pub fn century_of_year(year: i32) -> i32 {
    if year >= 0 {
        year / 100 + 1
    } else {
        -((-year - 1) / 100 + 1)
    }
}

/// Century containing the interval midpoint.
pub fn century_of_interval(interval: YearInterval) -> i32 {
    century_of_year(interval.midpoint())
}

const ORDINAL_WORDS: &[&str] = &[
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
    "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth", "sixteenth", "seventeenth",
    "eighteenth", "nineteenth", "twentieth", "twenty-first",
];

const MONTHS: &str = r"(?:jan|feb|mar|apr|may|jun|jul|aug|sep|sept|oct|nov|dec)[a-z]*\.?";

static CIRCA: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:circa|ca\.?|c\.|c|about|around|approximately|approx\.?)\s*(.+)$").unwrap()
});
static ERA_SUFFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(.+?)\s*(b\.?\s?c\.?(?:\s?e\.?)?|a\.?\s?d\.?|c\.?\s?e\.?)$").unwrap());
static ERA_PREFIX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^a\.?\s?d\.?\s+(.+)$").unwrap());
static QUALIFIER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:early|mid|middle|late|the|the early|the late|the mid)[-\s]+(.+)$").unwrap()
});
static CENTURY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^([a-z0-9-]+?)\s*(?:-|\s)?\s*(?:century|centuries|cent\.?|c\.?)$").unwrap()
});
static CENTURY_RANGE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^([a-z0-9-]+?)(?:\s*(?:century|c\.?))?\s*(?:-|to|or|and)\s*([a-z0-9-]+?)\s*(?:-|\s)?\s*(?:century|centuries|cent\.?|c\.?)$").unwrap()
});
static YEAR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d{1,4})$").unwrap());
static YEAR_RANGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{1,4})\s*(?:-|to)\s*(\d{1,4})$").unwrap());
static DECADE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d{2,3}0)'?s$").unwrap());
static ISO_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{3,4})-(\d{2})-(\d{2})$").unwrap());
static MONTH_DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"^(?:\d{{1,2}}(?:st|nd|rd|th)?\s+)?(?:of\s+)?{MONTHS}\s+(?:\d{{1,2}}(?:st|nd|rd|th)?,?\s+)?(\d{{1,4}})$"
    ))
    .unwrap()
});

fn ordinal(token: &str) -> Option<i32> {
    let t = token.trim_matches('-');
    if let Some(pos) = ORDINAL_WORDS.iter().position(|w| *w == t) {
        return Some(pos as i32 + 1);
    }
    let digits = t
        .strip_suffix("st")
        .or_else(|| t.strip_suffix("nd"))
        .or_else(|| t.strip_suffix("rd"))
        .or_else(|| t.strip_suffix("th"))
        .unwrap_or(t);
    let n: i32 = digits.parse().ok()?;
    (1..=40).contains(&n).then_some(n)
}

fn positive_year(digits: &str) -> Option<i32> {
    let y: i32 = digits.parse().ok()?;
    (y > 0).then_some(y)
}

/// Parses an era-free core string into an interval on the CE axis
/// (values are later mirrored for BCE).
fn parse_core(s: &str, bce: bool) -> Option<YearInterval> {
    let sign = if bce { -1 } else { 1 };
    let s = QUALIFIER.captures(s).map(|c| c[1].to_string()).unwrap_or_else(|| s.to_string());
    let s = s.as_str();

    if let Some(c) = YEAR.captures(s) {
        return Some(YearInterval::year(sign * positive_year(&c[1])?));
    }
    if let Some(c) = YEAR_RANGE.captures(s) {
        let first = positive_year(&c[1])?;
        let second_digits = &c[2];
        // "1358-59" abbreviates the second year
        let second = if second_digits.len() <= 2 && second_digits.len() < c[1].len() {
            let prefix = &c[1][..c[1].len() - second_digits.len()];
            positive_year(&format!("{prefix}{second_digits}"))?
        } else {
            positive_year(second_digits)?
        };
        let (a, b) = (sign * first, sign * second);
        return YearInterval::new(a.min(b), a.max(b)).filter(|_| bce || first <= second);
    }
    if let Some(c) = DECADE.captures(s) {
        let start = positive_year(&c[1])?;
        let span = if start % 100 == 0 && c[1].len() >= 3 { 99 } else { 9 };
        return if bce {
            YearInterval::new(-(start + span), -start.max(1))
        } else {
            YearInterval::new(start, start + span)
        };
    }
    if let Some(c) = ISO_DATE.captures(s) {
        return Some(YearInterval::year(sign * positive_year(&c[1])?));
    }
    if let Some(c) = MONTH_DATE.captures(s) {
        return Some(YearInterval::year(sign * positive_year(&c[1])?));
    }
    if let Some(n) = CENTURY.captures(s).and_then(|c| ordinal(&c[1])) {
        return century_interval(sign * n);
    }
    if let Some(c) = CENTURY_RANGE.captures(s) {
        let a = century_interval(sign * ordinal(&c[1])?)?;
        let b = century_interval(sign * ordinal(&c[2])?)?;
        return Some(a.hull(b));
    }
    None
}

pub fn parse_historical_date(raw: &str) -> Result<YearInterval, DateError> {
    let err = || DateError { raw: raw.to_string() };
    let mut s = raw
        .trim()
        .to_lowercase()
        .replace(['\u{2013}', '\u{2014}', '\u{2012}', '\u{2212}'], "-");
    s = s.trim_end_matches(['.', ',', ';']).to_string();
    if s.is_empty() {
        return Err(err());
    }

    let mut circa = false;
    if let Some(c) = CIRCA.captures(&s) {
        // "c." is also the century abbreviation; only treat it as circa when
        // what follows starts with a digit or an era marker
        let rest = c[1].trim().to_string();
        if rest.starts_with(|ch: char| ch.is_ascii_digit()) || rest.starts_with("ad") {
            circa = true;
            s = rest;
        }
    }

    let mut bce = false;
    if let Some(c) = ERA_SUFFIX.captures(&s) {
        let era = c[2].replace(['.', ' '], "");
        let core = c[1].trim().to_string();
        if era.starts_with('b') {
            bce = true;
        }
        s = core;
    }
    if let Some(c) = ERA_PREFIX.captures(&s) {
        s = c[1].trim().to_string();
    }

    let interval = parse_core(s.trim(), bce).ok_or_else(err)?;
    Ok(if circa { interval.widen(CIRCA_WINDOW) } else { interval })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: i32, b: i32) -> YearInterval {
        YearInterval::new(a, b).unwrap()
    }

    #[test]
    fn century_convention() {
        assert_eq!(parse_historical_date("4th century").unwrap(), iv(300, 399));
        assert_eq!(parse_historical_date("12th c.").unwrap(), iv(1100, 1199));
        assert_eq!(parse_historical_date("fourth century").unwrap(), iv(300, 399));
        assert_eq!(parse_historical_date("4th-century").unwrap(), iv(300, 399));
        assert_eq!(parse_historical_date("10th century BC").unwrap(), iv(-1000, -901));
        assert_eq!(parse_historical_date("1st century BCE").unwrap(), iv(-100, -1));
        assert_eq!(parse_historical_date("early 4th century").unwrap(), iv(300, 399));
        assert_eq!(parse_historical_date("8th–9th century").unwrap(), iv(700, 899));
        assert_eq!(parse_historical_date("4th century AD").unwrap(), iv(300, 399));
        assert_eq!(parse_historical_date("4th century CE").unwrap(), iv(300, 399));
    }

    #[test]
    fn years_and_ranges() {
        assert_eq!(parse_historical_date("1196").unwrap(), iv(1196, 1196));
        assert_eq!(parse_historical_date("950–1050").unwrap(), iv(950, 1050));
        assert_eq!(parse_historical_date("950-1050").unwrap(), iv(950, 1050));
        assert_eq!(parse_historical_date("1358–59").unwrap(), iv(1358, 1359));
        assert_eq!(parse_historical_date("500–400 BC").unwrap(), iv(-500, -400));
        assert_eq!(parse_historical_date("AD 1156").unwrap(), iv(1156, 1156));
        assert_eq!(parse_historical_date("1156 AD").unwrap(), iv(1156, 1156));
        assert_eq!(parse_historical_date("44 BC").unwrap(), iv(-44, -44));
        assert_eq!(parse_historical_date("1150s").unwrap(), iv(1150, 1159));
        assert_eq!(parse_historical_date("1156-09-17").unwrap(), iv(1156, 1156));
        assert_eq!(parse_historical_date("17 September 1156").unwrap(), iv(1156, 1156));
        assert_eq!(parse_historical_date("September 17, 1156").unwrap(), iv(1156, 1156));
    }

    #[test]
    fn circa_window() {
        assert_eq!(parse_historical_date("c. 1100").unwrap(), iv(1090, 1110));
        assert_eq!(parse_historical_date("circa 1100").unwrap(), iv(1090, 1110));
        assert_eq!(parse_historical_date("ca. 1100").unwrap(), iv(1090, 1110));
    }

    #[test]
    fn rejects() {
        for raw in ["allegedly ancient", "", "0", "1050-950", "century", "NOT_MENTIONED", "55th century"] {
            let err = parse_historical_date(raw).unwrap_err();
            assert_eq!(err.raw, raw);
        }
    }

    #[test]
    fn century_of_interval_examples() {
        assert_eq!(century_of_interval(iv(300, 399)), 4);
        assert_eq!(century_of_interval(iv(1407, 1457)), 15);
        assert_eq!(century_of_interval(iv(-1000, -901)), -10);
        assert_eq!(century_of_interval(iv(-100, -1)), -1);
    }

    #[test]
    fn interval_serde_validates() {
        let ok: YearInterval = serde_json::from_str(r#"{"start_year":300,"end_year":399}"#).unwrap();
        assert_eq!(ok, iv(300, 399));
        assert!(serde_json::from_str::<YearInterval>(r#"{"start_year":9,"end_year":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn century_rule_inverts(n in -40i32..=40) {
            prop_assume!(n != 0);
            let interval = century_interval(n).unwrap();
            prop_assert_eq!(century_of_interval(interval), n);
            prop_assert_eq!(interval.end_year() - interval.start_year(), 99);
        }

        #[test]
        fn accepted_dates_are_ordered(raw in "(c\\. )?[0-9]{1,4}(-[0-9]{1,4})?( BC)?") {
            if let Ok(interval) = parse_historical_date(&raw) {
                prop_assert!(interval.start_year() <= interval.end_year());
            }
        }

        #[test]
        fn ordinal_centuries_parse(n in 1i32..=21, bce in any::<bool>()) {
            let suffix = match n % 10 { 1 if n != 11 => "st", 2 if n != 12 => "nd", 3 if n != 13 => "rd", _ => "th" };
            let raw = format!("{n}{suffix} century{}", if bce { " BC" } else { "" });
            let expected = century_interval(if bce { -n } else { n }).unwrap();
            prop_assert_eq!(parse_historical_date(&raw).unwrap(), expected);
        }
    }
}
