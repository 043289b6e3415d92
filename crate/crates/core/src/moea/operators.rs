use rand::Rng;

use super::MoeaConfig;
use crate::kinematics::HeadingVector;
use crate::scenario::Scenario;

/// Initial population: the first half draws every heading uniformly in the
/// bounds, the second half is a bounded random walk whose steps never exceed
/// the steering limit.
pub fn init_population<R: Rng>(config: &MoeaConfig, scenario: &Scenario, rng: &mut R) -> Vec<HeadingVector> {
    let len = scenario.slots();
    let [lo, hi] = scenario.phi_bounds;
    let dmax = scenario.dphi_max;
    let uniform = config.n_p / 2;
    (0..config.n_p)
        .map(|k| {
            if k < uniform {
                HeadingVector((0..len).map(|_| rng.random_range(lo..=hi)).collect())
            } else {
                let mut phi = Vec::with_capacity(len);
                let mut cur = rng.random_range(lo..=hi);
                phi.push(cur);
                for _ in 1..len {
                    let step = if dmax > 0.0 { rng.random_range(-dmax..=dmax) } else { 0.0 };
                    cur = (cur + step).clamp(lo, hi);
                    phi.push(cur);
                }
                HeadingVector(phi)
            }
        })
        .collect()
}

/// Spread factor for one gene from a uniform draw `nu` in `[0, 1]`.
pub fn sbx_beta(nu: f64, eta_c: f64) -> f64 {
    let e = 1.0 / (eta_c + 1.0);
    if nu <= 0.5 {
        (2.0 * nu).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - nu))).powf(e)
    }
}

/// Children of one gene pair for a given spread factor, before clamping.
pub fn sbx_pair(a: f64, b: f64, beta: f64) -> (f64, f64) {
    (0.5 * ((1.0 + beta) * a + (1.0 - beta) * b), 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b))
}

/// Simulated binary crossover on the first `active` genes; the rest are
/// inherited unchanged.
pub fn sbx<R: Rng>(
    a: &[f64],
    b: &[f64],
    eta_c: f64,
    bounds: [f64; 2],
    active: usize,
    rng: &mut R,
) -> (HeadingVector, HeadingVector) {
    assert_eq!(a.len(), b.len(), "parents must have equal length");
    let mut ca = a.to_vec();
    let mut cb = b.to_vec();
    for i in 0..active.min(a.len()) {
        let nu: f64 = rng.random();
        let (x, y) = sbx_pair(a[i], b[i], sbx_beta(nu, eta_c));
        ca[i] = x.clamp(bounds[0], bounds[1]);
        cb[i] = y.clamp(bounds[0], bounds[1]);
    }
    (HeadingVector(ca), HeadingVector(cb))
}

/// Polynomial mutation where each of the first `active` genes mutates with
/// the given probability.
pub fn polynomial_mutation<R: Rng>(
    parent: &[f64],
    eta_m: f64,
    probability: f64,
    [lo, hi]: [f64; 2],
    active: usize,
    rng: &mut R,
) -> HeadingVector {
    let span = hi - lo;
    let e = eta_m + 1.0;
    let mut out = parent.to_vec();
    for gene in out.iter_mut().take(active) {
        let chi: f64 = rng.random();
        if chi >= probability {
            continue;
        }
        let sigma: f64 = rng.random();
        let mu_a = (*gene - lo) / span;
        let mu_b = (hi - *gene) / span;
        let mu = if sigma <= 0.5 {
            (2.0 * sigma + (1.0 - 2.0 * sigma) * (1.0 - mu_a).powf(e)).powf(1.0 / e) - 1.0
        } else {
            1.0 - (2.0 * (1.0 - sigma) + (2.0 * sigma - 1.0) * (1.0 - mu_b).powf(e)).powf(1.0 / e)
        };
        *gene = (*gene + mu * span).clamp(lo, hi);
    }
    HeadingVector(out)
}

/// Mutation with the sailing-time-dependent probability `eta_m / ceil(M2)`.
pub fn mutate<R: Rng>(
    parent: &[f64],
    eta_m: f64,
    m2_ceil: usize,
    bounds: [f64; 2],
    active: usize,
    rng: &mut R,
) -> HeadingVector {
    let p = eta_m / m2_ceil.max(1) as f64;
    polynomial_mutation(parent, eta_m, p, bounds, active, rng)
}
