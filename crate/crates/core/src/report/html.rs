use std::fmt::Write as _;

use super::{ComponentReport, ReportDocument, ScoredLabel};

const STYLE: &str = r#"
    body { font-family: system-ui, -apple-system, "Segoe UI", sans-serif; margin: 0; background: #f5f5f7; color: #1d1d1f; }
    header { padding: 1.5rem 2rem; background: #fff; border-bottom: 1px solid #d2d2d7; }
    header h1 { margin: 0 0 .25rem; font-size: 1.5rem; }
    header p { margin: 0; color: #6e6e73; }
    main { max-width: 1400px; margin: 0 auto; padding: 1.5rem 2rem; }
    .notice { padding: 1rem; background: #fff3cd; border: 1px solid #e0c36b; border-radius: 6px; }
    section.component { background: #fff; border: 1px solid #d2d2d7; border-radius: 8px; margin-bottom: 1.5rem; padding: 1rem 1.25rem; }
    section.component h2 { margin: 0 0 .75rem; font-size: 1.1rem; }
    .modes { display: grid; grid-template-columns: repeat(auto-fit, minmax(260px, 1fr)); gap: 1rem; }
    table { border-collapse: collapse; width: 100%; font-size: .85rem; }
    th, td { text-align: left; padding: 2px 6px; border-bottom: 1px solid #eee; }
    td.score { text-align: right; font-variant-numeric: tabular-nums; }
    .neg { color: #c0392b; font-style: italic; }
    .cloud { margin-top: 1rem; line-height: 1.6; }
    .cloud span { display: inline-block; margin: 0 .4rem; color: #0b5cad; }
    .cloud span.neg { color: #c0392b; }
"#;

pub(super) fn render(doc: &ReportDocument) -> String {
    let meta = &doc.meta;
    let mut s = String::new();
    s.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    s.push_str("<title>Tensor topic components</title>\n<style>");
    s.push_str(STYLE);
    s.push_str("</style>\n</head>\n<body>\n<header>\n<h1>Tensor topic components</h1>\n");
    let ranks: Vec<String> = meta.ranks.iter().map(usize::to_string).collect();
    writeln!(
        s,
        "<p>{} components kept of {} pooled &middot; ranks {} &middot; threshold {} &middot; {}</p>",
        doc.components.len(),
        meta.pooled_components,
        escape(&ranks.join(", ")),
        meta.threshold,
        meta.strategy
    )
    .unwrap();
    s.push_str("</header>\n<main>\n");

    if doc.components.is_empty() {
        s.push_str("<p class=\"notice\">No components were selected. Try a different threshold, strategy or rank set.</p>\n");
    }
    for c in &doc.components {
        component(&mut s, c);
    }
    s.push_str("</main>\n</body>\n</html>\n");
    s
}

fn component(s: &mut String, c: &ComponentReport) {
    let neg = if c.weight < 0.0 { " neg" } else { "" };
    writeln!(
        s,
        "<section class=\"component\" id=\"c-{}-{}\">\n<h2>Component {} <span class=\"weight{neg}\">&lambda; = {:.6e}</span></h2>",
        c.id.origin_rank,
        c.id.index,
        escape(&c.id.to_string()),
        c.weight
    )
    .unwrap();
    s.push_str("<div class=\"modes\">\n");
    for m in &c.modes {
        writeln!(s, "<table>\n<thead><tr><th>{}</th><th>score</th></tr></thead>\n<tbody>", escape(&m.mode)).unwrap();
        for e in &m.entries {
            row(s, e);
        }
        s.push_str("</tbody>\n</table>\n");
    }
    s.push_str("</div>\n<div class=\"cloud\">\n");
    let max = c
        .keywords
        .iter()
        .map(|k| k.score.abs())
        .fold(0.0, f64::max);
    for k in &c.keywords {
        let rel = if max > 0.0 { k.score.abs() / max } else { 0.0 };
        let size = 0.75 + 1.75 * rel;
        let class = if k.score < 0.0 { " class=\"neg\"" } else { "" };
        writeln!(
            s,
            "<span{class} style=\"font-size:{size:.3}em\" data-weight=\"{}\">{}</span>",
            k.score,
            escape(&k.label)
        )
        .unwrap();
    }
    s.push_str("</div>\n</section>\n");
}

fn row(s: &mut String, e: &ScoredLabel) {
    let class = if e.score < 0.0 { " class=\"neg\"" } else { "" };
    writeln!(
        s,
        "<tr{class}><td>{}</td><td class=\"score\">{:.5}</td></tr>",
        escape(&e.label),
        e.score
    )
    .unwrap();
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}
