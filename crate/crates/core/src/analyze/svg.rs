use std::collections::HashMap;
use std::fmt::Write as _;

use super::{document_rows, TimelinePoint};
use crate::normalize::AuthenticityCategory;

pub const PALETTE: [(AuthenticityCategory, &str); 3] = [
    (AuthenticityCategory::Authentic, "#1b9e77"),
    (AuthenticityCategory::Forgery, "#d95f02"),
    (AuthenticityCategory::Suspicious, "#7570b3"),
];

const LEFT: i32 = 140;
const TOP: i32 = 40;
const COLUMN: i32 = 40;
const ROW: i32 = 28;
const LEGEND_WIDTH: i32 = 170;

fn color(category: AuthenticityCategory) -> &'static str {
    PALETTE
        .iter()
        .find(|(c, _)| *c == category)
        .map(|(_, hex)| *hex)
        .expect("palette covers every category")
}

/// Centuries have no year zero, so -1 sits directly left of 1.
fn ordinal(century: i32) -> i32 {
    if century > 0 {
        century - 1
    } else {
        century
    }
}

fn century_label(century: i32) -> String {
    if century < 0 {
        format!("{} BCE", -century)
    } else {
        century.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Scatter of claims: x is the claimant's century, y the document row.
pub fn render_svg(points: &[TimelinePoint]) -> String {
    let rows = document_rows(points);
    let row_of: HashMap<&str, i32> = rows.iter().enumerate().map(|(i, d)| (*d, i as i32)).collect();
    let (lo, hi) = points
        .iter()
        .map(|p| ordinal(p.century))
        .fold(None, |acc: Option<(i32, i32)>, o| match acc {
            None => Some((o, o)),
            Some((a, b)) => Some((a.min(o), b.max(o))),
        })
        .unwrap_or((ordinal(1), ordinal(21)));
    let columns = hi - lo + 1;
    let plot_w = columns * COLUMN;
    let plot_h = (rows.len() as i32).max(1) * ROW;
    let width = LEFT + plot_w + 20 + LEGEND_WIDTH;
    let height = TOP + plot_h + 60;
    let x_of = |c: i32| LEFT + (ordinal(c) - lo) * COLUMN + COLUMN / 2;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">Claims by century of the claimant's activity</text>"#,
        LEFT + plot_w / 2
    );

    // axes
    let bottom = TOP + plot_h;
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{bottom}" x2="{}" y2="{bottom}"/>"#, LEFT + plot_w);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}"/>"#);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g text-anchor="middle">"#);
    for o in lo..=hi {
        let century = if o >= 0 { o + 1 } else { o };
        let x = x_of(century);
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{bottom}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}">{}</text>"##,
            bottom + 4,
            bottom + 16,
            century_label(century)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">Century</text>"#,
        LEFT + plot_w / 2,
        bottom + 36
    );
    let _ = writeln!(s, r#"<g text-anchor="end">"#);
    for (i, doc) in rows.iter().enumerate() {
        let y = TOP + i as i32 * ROW + ROW / 2;
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, LEFT - 6, y + 4, escape(doc));
    }
    let _ = writeln!(s, "</g>");

    // marks; repeated cells fan out horizontally in input order
    let mut cell_seen: HashMap<(i32, i32), i32> = HashMap::new();
    let _ = writeln!(s, r#"<g fill-opacity="0.85">"#);
    for p in points {
        let row = row_of[p.document_id.as_str()];
        let k = cell_seen.entry((row, p.century)).or_insert(0);
        let jitter = (*k % 5 - 2) * 6;
        *k += 1;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="5" fill="{}"><title>{} ({}): {}</title></circle>"#,
            x_of(p.century) + jitter,
            TOP + row * ROW + ROW / 2,
            color(p.category),
            escape(&p.claimant_label),
            escape(&p.document_id),
            p.category.label()
        );
    }
    let _ = writeln!(s, "</g>");

    // legend
    let lx = LEFT + plot_w + 20;
    let _ = writeln!(s, r#"<g>"#);
    for (i, (category, hex)) in PALETTE.iter().enumerate() {
        let y = TOP + i as i32 * 20;
        let count = points.iter().filter(|p| p.category == *category).count();
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{y}" width="12" height="12" fill="{hex}"/><text x="{}" y="{}">{} ({count})</text>"#,
            lx + 18,
            y + 10,
            category.label()
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
