//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; the page does the drawing.

use automeasure::conditionals::uniformity_census;
use automeasure::groups::FiniteGroup;
use automeasure::measures::{kitchens, m_odd, Measure, MeasureSpec};
use automeasure::rlp::{self, PQSystem, RationalPoint};
use automeasure::{Alphabet, LocalRule};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_STEPS: usize = 256;
const MAX_WIDTH: usize = 512;
const MAX_CENSUS_DEPTH: usize = 10;

fn named_rule(name: &str) -> Result<LocalRule, String> {
    match name {
        "ledrappier" => Ok(LocalRule::ledrappier()),
        "triangle" => Ok(LocalRule::triangle()),
        "z3" => Ok(FiniteGroup::cyclic(3).map_err(|e| e.to_string())?.group_rule()),
        "d3" => Ok(FiniteGroup::dihedral(3).map_err(|e| e.to_string())?.group_rule()),
        _ => Err(format!("unknown rule `{name}`")),
    }
}

fn named_measure(name: &str) -> Result<MeasureSpec, String> {
    match name {
        "kitchens" => Ok(kitchens()),
        "m_odd" => Ok(m_odd()),
        "uniform" => Ok(MeasureSpec::uniform(&Alphabet::numeric(2).map_err(|e| e.to_string())?)),
        "ledrappier_pushed" => Ok(m_odd().push_shift().push_rule(&LocalRule::ledrappier())),
        _ => Err(format!("unknown measure `{name}`")),
    }
}

/// Space-time diagram of a rule started from `seed` (labels or indices,
/// comma or space separated; shorter seeds are repeated to `width`).
/// Row `t` is `τ^t` of the row above, so rows shrink by one cell per step.
#[wasm_bindgen]
pub fn ca_diagram(rule: &str, seed: &str, width: usize, steps: usize) -> Result<String, String> {
    let rule = named_rule(rule)?;
    let width = width.clamp(1, MAX_WIDTH);
    let steps = steps.min(MAX_STEPS).min(width - 1);
    let pattern = rule.alphabet().parse_word(seed).map_err(|e| e.to_string())?;
    if pattern.is_empty() {
        return Err("seed is empty".into());
    }
    let mut row: Vec<_> = pattern.iter().cycle().take(width).copied().collect();
    let mut rows = vec![row.clone()];
    for _ in 0..steps {
        row = rule.apply(&row).map_err(|e| e.to_string())?;
        rows.push(row.clone());
    }
    Ok(json!({
        "labels": rule.alphabet().labels(),
        "bipermutative": rule.is_bipermutative(),
        "rows": rows,
    })
    .to_string())
}

/// Digit diagram of `x` under multiplication by `p` (across) and `q`
/// (down), with the reciprocity counts for `l = 2..=l_max`.
#[wasm_bindgen]
pub fn pq_diagram(p: u64, q: u64, x: &str, width: usize, height: usize, l_max: usize) -> Result<String, String> {
    let sys = PQSystem::new(p, q).map_err(|e| e.to_string())?;
    let x = RationalPoint::parse(x).map_err(|e| e.to_string())?;
    let (width, height) = (width.clamp(1, 64), height.clamp(1, 64));
    let grid = rlp::space_time(&sys, x, width, height);
    let rows = rlp::sub_exponential_report(&sys, l_max.clamp(2, 12)).map_err(|e| e.to_string())?;
    Ok(json!({
        "x": x.to_string(),
        "base": sys.base(),
        "grid": grid,
        "expansion": rlp::expansion(x, sys.base(), width.min(height)),
        "counts": rows,
    })
    .to_string())
}

/// Uniformity census and block entropies of a named measure.
#[wasm_bindgen]
pub fn measure_census(name: &str, n: usize) -> Result<String, String> {
    let spec = named_measure(name)?;
    let n = n.clamp(1, MAX_CENSUS_DEPTH);
    let mu = Measure::compile(&spec)
        .map_err(|e| e.to_string())?
        .with_depth_cap(MAX_CENSUS_DEPTH + 2);
    let census = uniformity_census(&mu, n).map_err(|e| e.to_string())?;
    let entropies = mu.entropy_table(n).map_err(|e| e.to_string())?;
    Ok(json!({ "census": census, "entropies": entropies }).to_string())
}
