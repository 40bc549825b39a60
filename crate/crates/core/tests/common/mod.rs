//! Reference implementations and random fixtures shared by the integration
//! tests. Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segeval::LabelMask;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random mask: a few rectangles per label plus salt noise, so both large
/// segments and many tiny ones appear.
pub fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, n_labels: u8) -> LabelMask {
    let mut m = LabelMask::zeros(w, h).unwrap();
    for label in 1..=n_labels {
        for _ in 0..rng.gen_range(0..4) {
            let rh = rng.gen_range(1..=h.min(12));
            let rw = rng.gen_range(1..=w.min(12));
            let top = rng.gen_range(0..=h - rh);
            let left = rng.gen_range(0..=w - rw);
            for r in top..top + rh {
                for c in left..left + rw {
                    m.set(r, c, label);
                }
            }
        }
        let noise = rng.gen_range(0.0..0.08);
        for r in 0..h {
            for c in 0..w {
                if rng.gen_bool(noise) {
                    m.set(r, c, label);
                }
            }
        }
    }
    m
}

/// Copy of `gt` with `flips` random pixels set to random labels in `0..=n_labels`.
pub fn perturb(rng: &mut ChaCha8Rng, gt: &LabelMask, flips: usize, n_labels: u8) -> LabelMask {
    let mut m = gt.clone();
    for _ in 0..flips {
        let r = rng.gen_range(0..m.height());
        let c = rng.gen_range(0..m.width());
        m.set(r, c, rng.gen_range(0..=n_labels));
    }
    m
}

/// Grows a 4-connected blob by random walk from the image centre.
pub fn random_blob(rng: &mut ChaCha8Rng, w: usize, h: usize, steps: usize) -> LabelMask {
    let mut m = LabelMask::zeros(w, h).unwrap();
    let (mut r, mut c) = (h / 2, w / 2);
    m.set(r, c, 1);
    for _ in 0..steps {
        match rng.gen_range(0..4) {
            0 if r > 0 => r -= 1,
            1 if r + 1 < h => r += 1,
            2 if c > 0 => c -= 1,
            3 if c + 1 < w => c += 1,
            _ => {}
        }
        m.set(r, c, 1);
    }
    m
}

/// Segments of `label` by explicit-stack flood fill; returns pixel lists.
pub fn flood_fill_segments(m: &LabelMask, label: u8, eight: bool) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = m.dims();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for r0 in 0..h {
        for c0 in 0..w {
            if m.get(r0, c0) != label || seen[r0 * w + c0] {
                continue;
            }
            let mut seg = Vec::new();
            let mut stack = vec![(r0, c0)];
            seen[r0 * w + c0] = true;
            while let Some((r, c)) = stack.pop() {
                seg.push((r, c));
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        if (dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0) {
                            continue;
                        }
                        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if m.get(nr, nc) == label && !seen[nr * w + nc] {
                            seen[nr * w + nc] = true;
                            stack.push((nr, nc));
                        }
                    }
                }
            }
            seg.sort();
            out.push(seg);
        }
    }
    out
}

fn q(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational score computed from first principles.
/// Returns `None` for the vacuous case (no ground-truth segment).
pub fn oracle_ssegep_exact(gt: &LabelMask, pred: &LabelMask, labels: &[u8], eight: bool) -> Option<BigRational> {
    let mut numerator = BigRational::zero();
    let mut n_segments = 0u64;
    let mut weighted_fp = BigRational::zero();
    for &label in labels {
        let mut label_tp = 0u64;
        for seg in flood_fill_segments(gt, label, eight) {
            let hit = seg.iter().filter(|&&(r, c)| pred.get(r, c) == label).count() as u64;
            numerator += q(hit, seg.len() as u64);
            label_tp += hit;
            n_segments += 1;
        }
        let mut fp = 0u64;
        for r in 0..gt.height() {
            for c in 0..gt.width() {
                if pred.get(r, c) == label && gt.get(r, c) != label {
                    fp += 1;
                }
            }
        }
        if fp > 0 {
            weighted_fp += if label_tp == 0 { q(fp, 1) } else { q(fp, label_tp) };
        }
    }
    if n_segments == 0 {
        return None;
    }
    Some(numerator / (BigRational::from_integer(BigInt::from(n_segments)) + weighted_fp))
}

pub fn oracle_ssegep(gt: &LabelMask, pred: &LabelMask, labels: &[u8], eight: bool) -> Option<f64> {
    oracle_ssegep_exact(gt, pred, labels, eight).map(|r| r.to_f64().unwrap())
}

/// Composite Simpson's rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Two-tailed Student-t p-value by numerical integration of the density.
///
/// With `x = sqrt(dof) tan θ` the density kernel becomes `cos^(dof-1) θ` on
/// `(-π/2, π/2)`, so the tail mass is a ratio of two smooth integrals and no
/// gamma function is needed.
pub fn oracle_t_two_tailed(t: f64, dof: f64) -> f64 {
    let kernel = |theta: f64| theta.cos().powf(dof - 1.0);
    let half = std::f64::consts::FRAC_PI_2;
    let theta_t = (t.abs() / dof.sqrt()).atan();
    let tail = simpson(kernel, theta_t, half, 20_000);
    let total = simpson(kernel, 0.0, half, 20_000);
    tail / total
}

/// Upper tail of F(1, d2) at `w`, via `sqrt(F(1, d)) ~ |t(d)|`.
pub fn oracle_f1_upper(w: f64, d2: f64) -> f64 {
    oracle_t_two_tailed(w.sqrt(), d2)
}
