//! Composite Gauss-Legendre rules of fixed order.

use gauss_quad::legendre::GaussLegendre;
use once_cell::sync::Lazy;

/// Nodes per panel.
pub const ORDER: usize = 8;

static REFERENCE: Lazy<Vec<(f64, f64)>> = Lazy::new(|| {
    let rule = GaussLegendre::new(ORDER.try_into().expect("nonzero order"));
    let mut pairs = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
});

/// Nodes and weights on `[−1, 1]`, ascending.
pub fn reference() -> &'static [(f64, f64)] {
    &REFERENCE
}

/// `panels` equal panels on `[a, b]`.
pub fn panel_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * ORDER);
    for k in 0..panels {
        push_panel(&mut out, a + k as f64 * h, a + (k + 1) as f64 * h);
    }
    out
}

pub fn push_panel(out: &mut Vec<(f64, f64)>, a: f64, b: f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    out.extend(reference().iter().map(|&(x, w)| (mid + half * x, half * w)));
}
