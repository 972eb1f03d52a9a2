//! Report assembly: machine-readable JSON values with all rationals printed
//! exactly as "p/q" strings and deterministic key order.

use hitchin_core::adelic::{CharCase, CharDatum};
use hitchin_core::json;
use hitchin_core::polytope::HnResult;
use hitchin_core::ratmat::Rat;
use hitchin_core::suite::SuiteOutcome;
use serde_json::{json, Value};

pub fn rat_str(x: &Rat) -> String {
    x.to_string()
}

pub fn suite_value(name: &str, o: &SuiteOutcome) -> Value {
    json!({
        "suite": name,
        "cases": o.cases,
        "checks": o.checks,
        "failures": o.failures,
        "ok": o.ok(),
    })
}

pub fn hn_value(r: &HnResult) -> Value {
    json!({
        "rho": json::vec_to_json(&r.rho),
        "q": r.q.key(),
        "dist2": rat_str(&r.dist2),
    })
}

pub fn weights_value(
    w_direct: u64,
    w_limit: u64,
    v_direct: &Rat,
    v_limit: &Rat,
    reference: &str,
    directions: usize,
) -> Value {
    json!({
        "w_direct": w_direct,
        "w_limit": w_limit,
        "v_direct": rat_str(v_direct),
        "v_limit": rat_str(v_limit),
        "reference_lattice": reference,
        "directions_tested": directions,
    })
}

pub fn instance_value(c: &CharDatum) -> Value {
    let ff = &c.ff;
    let divisor: Vec<Value> = c
        .divisor
        .iter()
        .map(|(p, m)| json!([p.display(ff), m]))
        .collect();
    let case = match &c.case {
        CharCase::SplitSl { lambda } => json!({
            "kind": "split_sl2",
            "lambda": lambda.display(ff),
        }),
        CharCase::Gl2Split { l1, l2 } => json!({
            "kind": "gl2_split",
            "l1": l1.display(ff),
            "l2": l2.display(ff),
        }),
        CharCase::Elliptic { c: cc } => json!({
            "kind": "elliptic",
            "c": ff.display(cc),
        }),
    };
    json!({
        "q": ff.q(),
        "D": divisor,
        "case": case,
        "deg_D": c.deg_divisor(),
    })
}
