//! Closed-form oracles shared by the integration suites. Nothing here calls
//! the library's eigensolver or decomposition.
#![allow(dead_code)]

use heatprobe::lindblad::{BathLabel, DecayChannel};
use heatprobe::mathcore::{ComplexMatrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const T_PRESET: (f64, f64, f64) = (30.0, 20.0, 10.0);

/// Product-basis index of device level `k` and probe level `p` (0 = g).
pub fn idx(k: usize, p: usize) -> usize {
    2 * k + p
}

pub fn ket(dim: usize, comps: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for &(i, x) in comps {
        v[i] += x;
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// `|u⟩⟨v|` scaled by `c`.
pub fn op(u: &[f64], v: &[f64], c: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| C64::new(c * u[i] * v[j], 0.0))
}

pub fn sandwich(u: &[f64], m: &ComplexMatrix, v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += u[i] * m[(i, j)].re * v[j];
        }
    }
    s
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Probed three-level maser (cold interface) spectrum in closed form.
pub fn maser_probe_spectrum(wc: f64, wh: f64, om: f64, j: f64) -> Vec<f64> {
    let root = (4.0 * j * j + (wc - om).powi(2)).sqrt();
    sorted(vec![0.0, 0.5 * (wc + om - root), 0.5 * (wc + om + root), wc + om, wh, wh + om])
}

/// Coefficients of the characteristic cubic of the `|a,e⟩, |b,g⟩, |c,g⟩`
/// block of the probed four-level device.
pub fn pump_cubic(wc: f64, g: f64, om: f64, j: f64) -> (f64, f64, f64) {
    (-(om + 2.0 * wc), wc * wc + 2.0 * om * wc - g * g - j * j, g * g * om + j * j * wc - om * wc * wc)
}

/// An expected channel: Bohr frequency and lowering operator.
#[derive(Debug, Clone)]
pub struct Expected {
    pub omega: f64,
    pub jump: ComplexMatrix,
    pub label: &'static str,
}

fn sum_ops(terms: Vec<ComplexMatrix>) -> ComplexMatrix {
    let mut it = terms.into_iter();
    let mut acc = it.next().expect("at least one term");
    for t in it {
        acc += &t;
    }
    acc
}

fn pair(n: usize, i: usize, j: usize) -> ComplexMatrix {
    &ComplexMatrix::unit(n, i, j) + &ComplexMatrix::unit(n, j, i)
}

/// Analytic jump operators of the probed maser, probe on the cold interface.
/// Mixed levels `|±⟩ ∝ (E∓ - ω_c)|a,e⟩ + J|b,g⟩`.
pub fn maser_probe_jumps(wc: f64, wh: f64, om: f64, j: f64) -> Vec<(BathLabel, Vec<Expected>)> {
    let d = 6;
    let root = (4.0 * j * j + (wc - om).powi(2)).sqrt();
    let e2 = 0.5 * (wc + om - root);
    let e3 = 0.5 * (wc + om + root);
    let (a, b, c) = (0, 1, 2);
    let s1 = ket(d, &[(idx(a, 0), 1.0)]);
    let s2 = ket(d, &[(idx(a, 1), e2 - wc), (idx(b, 0), j)]);
    let s3 = ket(d, &[(idx(a, 1), e3 - wc), (idx(b, 0), j)]);
    let s4 = ket(d, &[(idx(b, 1), 1.0)]);
    let s5 = ket(d, &[(idx(c, 0), 1.0)]);
    let s6 = ket(d, &[(idx(c, 1), 1.0)]);

    let id = ComplexMatrix::identity(2);
    let cold = &pair(3, a, b).kron(&id) + &ComplexMatrix::identity(3).kron(&pair(2, 0, 1));
    let work = pair(3, b, c).kron(&id);
    let hot = pair(3, a, c).kron(&id);
    let el = |m: &ComplexMatrix, u: &[f64], v: &[f64]| op(u, v, sandwich(u, m, v));

    vec![
        (
            BathLabel::Cold,
            vec![
                Expected { omega: e2, jump: sum_ops(vec![el(&cold, &s1, &s2), el(&cold, &s3, &s4)]), label: "cold E2" },
                Expected { omega: e3, jump: sum_ops(vec![el(&cold, &s1, &s3), el(&cold, &s2, &s4)]), label: "cold E3" },
                Expected { omega: om, jump: op(&s5, &s6, 1.0), label: "cold Omega" },
            ],
        ),
        (
            BathLabel::Work,
            vec![
                Expected { omega: wh - e2, jump: el(&work, &s2, &s5), label: "work wh-E2" },
                Expected { omega: wh - e3, jump: el(&work, &s3, &s5), label: "work wh-E3" },
                Expected { omega: wh - wc, jump: op(&s4, &s6, 1.0), label: "work wh-wc" },
            ],
        ),
        (
            BathLabel::Hot,
            vec![
                Expected { omega: wh, jump: op(&s1, &s5, 1.0), label: "hot wh" },
                Expected { omega: wh + om - e2, jump: el(&hot, &s2, &s6), label: "hot wh+Om-E2" },
                Expected { omega: wh + om - e3, jump: el(&hot, &s3, &s6), label: "hot wh+Om-E3" },
            ],
        ),
    ]
}

/// Analytic jump operators of the probed four-level device, probe on the
/// cold interface. `roots` are the three roots of [`pump_cubic`]; the
/// corresponding levels are
/// `∝ ((E-ω_c)² - g²)|a,e⟩ + J(E-ω_c)|b,g⟩ + gJ|c,g⟩`, and
/// `|∓⟩ = (|b,e⟩ ∓ |c,e⟩)/√2` sit at `ω_c + Ω ∓ g`.
pub fn pump_probe_jumps(wc: f64, wh: f64, g: f64, om: f64, j: f64, roots: [f64; 3]) -> Vec<(BathLabel, Vec<Expected>)> {
    let d = 8;
    let (a, b, c, dd) = (0, 1, 2, 3);
    let ag = ket(d, &[(idx(a, 0), 1.0)]);
    let dg = ket(d, &[(idx(dd, 0), 1.0)]);
    let de = ket(d, &[(idx(dd, 1), 1.0)]);
    let minus = ket(d, &[(idx(b, 1), 1.0), (idx(c, 1), -1.0)]);
    let plus = ket(d, &[(idx(b, 1), 1.0), (idx(c, 1), 1.0)]);
    let mixed: Vec<Vec<f64>> = roots
        .iter()
        .map(|&e| ket(d, &[(idx(a, 1), (e - wc).powi(2) - g * g), (idx(b, 0), j * (e - wc)), (idx(c, 0), g * j)]))
        .collect();

    let id = ComplexMatrix::identity(2);
    let cold = &pair(4, a, b).kron(&id) + &ComplexMatrix::identity(4).kron(&pair(2, 0, 1));
    let work = pair(4, c, dd).kron(&id);
    let hot = pair(4, a, dd).kron(&id);
    let el = |m: &ComplexMatrix, u: &[f64], v: &[f64]| op(u, v, sandwich(u, m, v));

    let mut cold_list = Vec::new();
    let mut work_list = Vec::new();
    let mut hot_list = vec![Expected { omega: wh, jump: op(&ag, &dg, 1.0), label: "hot wh" }];
    for (k, x) in mixed.iter().enumerate() {
        let e = roots[k];
        cold_list.push(Expected { omega: e, jump: el(&cold, &ag, x), label: "cold E_i" });
        cold_list.push(Expected { omega: wc + om - g - e, jump: el(&cold, x, &minus), label: "cold (wc+Om-g)-E_i" });
        cold_list.push(Expected { omega: wc + om + g - e, jump: el(&cold, x, &plus), label: "cold (wc+Om+g)-E_i" });
        work_list.push(Expected { omega: wh - e, jump: el(&work, x, &dg), label: "work wh-E_i" });
        hot_list.push(Expected { omega: wh + om - e, jump: el(&hot, x, &de), label: "hot wh+Om-E_i" });
    }
    cold_list.push(Expected { omega: om, jump: op(&dg, &de, 1.0), label: "cold Omega" });
    work_list.push(Expected { omega: wh - wc + g, jump: el(&work, &minus, &de), label: "work wh-wc+g" });
    work_list.push(Expected { omega: wh - wc - g, jump: el(&work, &plus, &de), label: "work wh-wc-g" });
    vec![(BathLabel::Cold, cold_list), (BathLabel::Work, work_list), (BathLabel::Hot, hot_list)]
}

/// Smallest gap between any two expected frequencies of one bath, and the
/// smallest frequency overall.
pub fn separation(expected: &[(BathLabel, Vec<Expected>)]) -> (f64, f64) {
    let mut gap = f64::INFINITY;
    let mut lowest = f64::INFINITY;
    for (_, list) in expected {
        let f = sorted(list.iter().map(|e| e.omega).collect());
        lowest = lowest.min(f[0]);
        for w in f.windows(2) {
            gap = gap.min(w[1] - w[0]);
        }
    }
    (gap, lowest)
}

/// `min_φ ‖numeric - e^{iφ} expected‖_F`.
pub fn phase_aligned_error(numeric: &ComplexMatrix, expected: &ComplexMatrix) -> f64 {
    let overlap = expected.inner(numeric);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    (numeric - &expected.scale(phase)).frobenius_norm()
}

/// Transitions at one Bohr frequency share a single jump operator.
pub fn merge_equal_frequencies(list: &[Expected], tol: f64) -> Vec<Expected> {
    let mut out: Vec<Expected> = Vec::new();
    for e in list {
        match out.iter_mut().find(|m| (m.omega - e.omega).abs() <= tol) {
            Some(m) => m.jump += &e.jump,
            None => out.push(e.clone()),
        }
    }
    out
}

/// Worst phase-aligned operator error between the decomposition and the
/// closed-form list, or `None` when frequencies or channel counts disagree.
pub fn compare_jumps(channels: &[DecayChannel], expected: &[(BathLabel, Vec<Expected>)], freq_tol: f64) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for (bath, list) in expected {
        let list = merge_equal_frequencies(list, freq_tol);
        let numeric: Vec<&DecayChannel> = channels.iter().filter(|c| c.bath == *bath).collect();
        if numeric.len() != list.len() {
            return None;
        }
        for e in &list {
            let hit = numeric.iter().find(|c| (c.omega - e.omega).abs() <= freq_tol)?;
            worst = worst.max(phase_aligned_error(&hit.jump, &e.jump));
        }
    }
    Some(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub wc: f64,
    pub wh: f64,
    pub g: f64,
    pub om: f64,
    pub j: f64,
}

/// Random parameters in the regime where every listed transition keeps its
/// orientation: `Ω > 2g`, `ω_h` well above all mixed levels.
pub fn draw(rng: &mut ChaCha8Rng) -> Draw {
    let wc: f64 = rng.gen_range(3.0..15.0);
    let g = rng.gen_range(0.05..1.0);
    let j = rng.gen_range(0.01..0.3);
    let om: f64 = rng.gen_range(2.0 * g + 1.0..20.0);
    let wh = rng.gen_range(wc.max(om) + 10.0..70.0);
    Draw { wc, wh, g, om, j }
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    raw.hermitian_part()
}

/// Random unitary from Gram–Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect();
    for k in 0..n {
        for m in 0..k {
            let proj: C64 = cols[m].iter().zip(&cols[k]).map(|(a, b)| a.conj() * b).sum();
            let prev = cols[m].clone();
            for (x, p) in cols[k].iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[k].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}
