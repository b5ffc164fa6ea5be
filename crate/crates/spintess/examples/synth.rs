//! Derive the mark-rewrite rule from scratch and print the result.
//!
//! Run with `cargo run --release --example synth`.

use spintess::relations::synthesize_rule;

fn hex(patterns: [u8; 6]) -> String {
    patterns.map(|p| format!("{p:#04x}")).join(" ")
}

fn main() {
    let report = synthesize_rule(true).expect("synthesis runs");
    println!("candidates: {}", report.candidates);
    if !report.rejection_counts.is_empty() {
        println!("rejections:");
        for (name, count) in &report.rejection_counts {
            println!("  {name}: {count}");
        }
    }
    println!("survivors: {}", report.survivors.len());
    for rule in &report.survivors {
        println!("  {rule}  [{}]", hex(rule.patterns()));
    }
    for h in &report.heldout {
        println!(
            "held-out commutator families for [{}]: short {}, long {}",
            hex(h.rule.patterns()),
            if h.commutator_short { "match" } else { "MISMATCH" },
            if h.commutator_long { "match" } else { "MISMATCH" },
        );
    }
}
