//! Graphviz export. Identities are omitted; morphisms for which `dashed`
//! holds are drawn dashed.

use std::fmt::Write;

use crate::id::Id;
use crate::kernel::FinCategory;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn category_to_dot(c: &FinCategory, name: &str, dashed: impl Fn(&Id) -> bool) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    for x in c.objects() {
        writeln!(out, "  {};", quote(x)).unwrap();
    }
    for (m, a) in c.proper_morphisms() {
        let style = if dashed(m) { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  {} -> {} [label={}{style}];",
            quote(&a.src),
            quote(&a.tgt),
            quote(m)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
