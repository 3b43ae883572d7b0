//! Globally adaptive Gauss–Kronrod cubature on boxes.
//!
//! Every box is integrated with the tensor product of the 15-point Kronrod
//! rule; the embedded 7-point Gauss tensor rule gives the error estimate, and
//! mixing Gauss along a single axis gives per-axis estimates that pick the
//! split direction. Boxes can carry a `zone` tag so several integrands (or
//! several parametrisations of one domain) share a single error budget.

use num_complex::Complex64;

use crate::par::Execution;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const NODES: usize = 15;

/// Nodes on [−1, 1] with Kronrod weights and Gauss weights (zero off the
/// Gauss subset).
pub(crate) struct Rule15 {
    pub x: [f64; NODES],
    pub wk: [f64; NODES],
    pub wg: [f64; NODES],
}

pub(crate) const fn rule15() -> Rule15 {
    let mut x = [0.0; NODES];
    let mut wk = [0.0; NODES];
    let mut wg = [0.0; NODES];
    let mut i = 0;
    while i < NODES {
        let j = if i < 7 { i } else { 14 - i };
        x[i] = if i < 7 { -XGK[j] } else { XGK[j] };
        wk[i] = WGK[j];
        wg[i] = if j == 7 {
            WG[3]
        } else if j % 2 == 1 {
            WG[(j - 1) / 2]
        } else {
            0.0
        };
        i += 1;
    }
    Rule15 { x, wk, wg }
}

pub(crate) const RULE: Rule15 = rule15();

/// An axis-aligned box tagged with the zone whose integrand applies on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<const D: usize> {
    pub zone: usize,
    pub lo: [f64; D],
    pub hi: [f64; D],
}

impl<const D: usize> Region<D> {
    pub fn new(zone: usize, lo: [f64; D], hi: [f64; D]) -> Self {
        Self { zone, lo, hi }
    }

    pub fn split(&self, axis: usize) -> Option<(Self, Self)> {
        let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
        if !(mid > self.lo[axis] && mid < self.hi[axis]) {
            return None;
        }
        let mut a = *self;
        let mut b = *self;
        a.hi[axis] = mid;
        b.lo[axis] = mid;
        Some((a, b))
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }
}

#[derive(Debug, Clone, Copy)]
struct Estimate {
    value: f64,
    error: f64,
    axis: usize,
}

fn estimate<const D: usize, F>(region: &Region<D>, f: &F) -> Estimate
where
    F: Fn(usize, &[f64; D]) -> f64,
{
    let mut half = [0.0; D];
    let mut center = [0.0; D];
    let mut volume = 1.0;
    for a in 0..D {
        half[a] = 0.5 * (region.hi[a] - region.lo[a]);
        center[a] = 0.5 * (region.hi[a] + region.lo[a]);
        volume *= half[a];
    }
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    let mut mixed = [0.0; D];
    let mut digits = [0usize; D];
    let total = NODES.pow(D as u32);
    let mut point = [0.0; D];
    for flat in 0..total {
        let mut rest = flat;
        for a in 0..D {
            digits[a] = rest % NODES;
            rest /= NODES;
            point[a] = center[a] + half[a] * RULE.x[digits[a]];
        }
        let v = f(region.zone, &point);
        let mut wk = 1.0;
        let mut wg = 1.0;
        for a in 0..D {
            wk *= RULE.wk[digits[a]];
            wg *= RULE.wg[digits[a]];
        }
        kronrod += wk * v;
        gauss += wg * v;
        for a in 0..D {
            let g = RULE.wg[digits[a]];
            if g != 0.0 {
                mixed[a] += wk / RULE.wk[digits[a]] * g * v;
            }
        }
    }
    let value = kronrod * volume;
    let mut axis = 0;
    let mut worst = -1.0;
    for a in 0..D {
        let e = (kronrod - mixed[a]).abs() * volume;
        if e > worst || (e == worst && region.width(a) > region.width(axis)) {
            worst = e;
            axis = a;
        }
    }
    let error = ((kronrod - gauss).abs() * volume).max(50.0 * f64::EPSILON * value.abs());
    Estimate { value, error, axis }
}

#[derive(Debug, Clone, Copy)]
pub struct CubatureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: u64,
    pub execution: Execution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubatureOutcome {
    pub value: f64,
    pub error: f64,
    pub evals: u64,
    pub converged: bool,
    pub regions: usize,
}

/// Cap on boxes produced by geometric pre-refinement.
const PRESPLIT_CAP: usize = 200_000;

/// Integrate `f` over the union of `initial` boxes.
///
/// `presplit` is applied before any evaluation and returns the axis along
/// which a box must be bisected (geometric grading toward known features).
/// Box selection and summation are sequential, so the outcome does not
/// depend on the execution mode.
pub fn integrate<const D: usize, F, R>(
    initial: Vec<Region<D>>,
    f: &F,
    presplit: &R,
    settings: &CubatureSettings,
) -> CubatureOutcome
where
    F: Fn(usize, &[f64; D]) -> f64 + Sync,
    R: Fn(&Region<D>) -> Option<usize>,
{
    let per_box = NODES.pow(D as u32) as u64;
    let box_budget = (settings.max_evals / per_box) as usize;
    if initial.len() > box_budget {
        return CubatureOutcome {
            value: 0.0,
            error: f64::INFINITY,
            evals: 0,
            converged: false,
            regions: 0,
        };
    }
    let presplit_cap = PRESPLIT_CAP.min(box_budget / 2).max(initial.len());

    let mut boxes = Vec::with_capacity(initial.len());
    let mut stack: Vec<(Region<D>, u32)> = initial.into_iter().rev().map(|r| (r, 0)).collect();
    while let Some((r, depth)) = stack.pop() {
        if boxes.len() + stack.len() < presplit_cap && depth < 60 {
            if let Some(axis) = presplit(&r) {
                if let Some((a, b)) = r.split(axis) {
                    stack.push((b, depth + 1));
                    stack.push((a, depth + 1));
                    continue;
                }
            }
        }
        boxes.push(r);
    }

    let mut ests = settings.execution.map(&boxes, |r| estimate(r, f));
    let mut evals = per_box * boxes.len() as u64;
    let mut frozen = vec![false; boxes.len()];

    loop {
        let value: f64 = ests.iter().map(|e| e.value).sum();
        let error: f64 = ests.iter().map(|e| e.error).sum();
        let tol = settings.abs_tol.max(settings.rel_tol * value.abs());
        let done = |converged| CubatureOutcome {
            value,
            error,
            evals,
            converged,
            regions: boxes.len(),
        };
        if error <= tol {
            return done(true);
        }

        let mut order: Vec<usize> = (0..boxes.len()).filter(|&i| !frozen[i]).collect();
        order.sort_by(|&a, &b| ests[b].error.total_cmp(&ests[a].error).then(a.cmp(&b)));
        let budget_boxes = settings.max_evals.saturating_sub(evals) / (2 * per_box);
        let mut chosen = Vec::new();
        let mut covered = 0.0;
        for &i in &order {
            if chosen.len() as u64 >= budget_boxes || covered >= 0.5 * (error - 0.5 * tol) {
                break;
            }
            covered += ests[i].error;
            chosen.push(i);
        }
        if chosen.is_empty() {
            return done(false);
        }

        let children: Vec<Option<[(Region<D>, Estimate); 2]>> =
            settings.execution.map(&chosen, |&i| {
                let (a, b) = boxes[i].split(ests[i].axis)?;
                Some([(a, estimate(&a, f)), (b, estimate(&b, f))])
            });
        for (&i, kids) in chosen.iter().zip(children) {
            match kids {
                Some([(a, ea), (b, eb)]) => {
                    evals += 2 * per_box;
                    boxes[i] = a;
                    ests[i] = ea;
                    boxes.push(b);
                    ests.push(eb);
                    frozen.push(false);
                }
                None => frozen[i] = true,
            }
        }
    }
}

/// Adaptive 15-point Gauss–Kronrod on `[a, b]` for a complex integrand.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol·|I|)` or `max_panels` is reached.
pub fn integrate_complex<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> (Complex64, f64, bool)
where
    F: Fn(f64) -> Complex64,
{
    struct Panel {
        a: f64,
        b: f64,
        value: Complex64,
        error: f64,
    }
    let eval = |a: f64, b: f64| {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut k = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        for i in 0..NODES {
            let v = f(c + h * RULE.x[i]);
            k += v * RULE.wk[i];
            g += v * RULE.wg[i];
        }
        Panel {
            a,
            b,
            value: k * h,
            error: ((k - g) * h).norm(),
        }
    };
    let mut panels = vec![eval(a, b)];
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.norm()) {
            return (value, error, true);
        }
        if panels.len() >= max_panels {
            return (value, error, false);
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("nonempty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return (value, error, false);
        }
        panels.push(eval(p.a, mid));
        panels.push(eval(mid, p.b));
    }
}
