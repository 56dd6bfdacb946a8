#![allow(dead_code)]

pub mod cli_cases;

use std::collections::BTreeMap;
use std::sync::Arc;

use gradua::{
    koszul_sign, levi_civita, rat, ratio, AlgebroidChartData, BodyPolynomial, Chart, ChartMorphism,
    Coord, Degree, LieAlgebraData, Monomial, Point, Rational, Section, VectorField,
};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(-5..=5);
    let d: i64 = rng.gen_range(1..=3);
    ratio(n, d)
}

pub fn nonzero_rat(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = small_rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn random_body(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> BodyPolynomial {
    let mut p = BodyPolynomial::zero(nvars);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let mut e = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=max_deg);
        while budget > 0 && nvars > 0 {
            e[rng.gen_range(0..nvars)] += 1;
            budget -= 1;
        }
        p = &p + &BodyPolynomial::monomial(e, small_rat(rng));
    }
    p
}

/// All normal-ordered words of length at most `max_len` (and the truncation).
pub fn normal_words(chart: &Chart, max_len: usize) -> Vec<Monomial> {
    let max_len = max_len.min(chart.truncation());
    let mut out = vec![Monomial::empty()];
    let mut frontier = vec![Vec::<usize>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            let start = w.last().copied().unwrap_or(0);
            for a in start..chart.formal_dim() {
                if w.last() == Some(&a) && chart.formal_degree(a).is_odd() {
                    continue;
                }
                let mut v = w.clone();
                v.push(a);
                out.push(Monomial::from_normal_word(chart, v.clone()).unwrap());
                next.push(v);
            }
        }
        frontier = next;
    }
    out
}

pub fn random_section(
    rng: &mut ChaCha8Rng,
    chart: &Arc<Chart>,
    max_body_deg: u32,
    max_word_len: usize,
    max_terms: usize,
) -> Section {
    let words = normal_words(chart, max_word_len);
    let mut f = Section::zero(chart);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let w = words.choose(rng).unwrap().clone();
        let body = random_body(rng, chart.smooth_dim(), max_body_deg, 2);
        f = &f + &Section::from_term(chart, w, body);
    }
    f
}

pub fn random_homogeneous_section(
    rng: &mut ChaCha8Rng,
    chart: &Arc<Chart>,
    degree: Degree,
    max_body_deg: u32,
    max_word_len: usize,
    max_terms: usize,
) -> Section {
    let words: Vec<Monomial> = normal_words(chart, max_word_len)
        .into_iter()
        .filter(|w| w.degree(chart) == degree)
        .collect();
    let mut f = Section::zero(chart);
    if words.is_empty() {
        return f;
    }
    for _ in 0..rng.gen_range(1..=max_terms) {
        let w = words.choose(rng).unwrap().clone();
        let body = random_body(rng, chart.smooth_dim(), max_body_deg, 2);
        f = &f + &Section::from_term(chart, w, body);
    }
    f
}

pub fn random_homogeneous_field(
    rng: &mut ChaCha8Rng,
    chart: &Arc<Chart>,
    degree: Degree,
    max_body_deg: u32,
    max_word_len: usize,
) -> VectorField {
    let images = chart
        .coords()
        .map(|c| {
            let d = chart.coord_degree(c) + degree;
            (
                c,
                random_homogeneous_section(rng, chart, d, max_body_deg, max_word_len, 2),
            )
        })
        .collect();
    VectorField::from_images(chart, images).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
    Point((0..n).map(|_| small_rat(rng)).collect())
}

pub fn random_antisymmetric(rng: &mut ChaCha8Rng, dim: usize) -> LieAlgebraData {
    let mut entries = Vec::new();
    for k in 0..dim {
        for i in 0..dim {
            for j in i + 1..dim {
                let v = small_rat(rng);
                entries.push((k, i, j, v.clone()));
                entries.push((k, j, i, -v));
            }
        }
    }
    LieAlgebraData::from_entries(dim, entries).unwrap()
}

// ---------------------------------------------------------------------------
// oracles

/// Normal form by adjacent transpositions: returns the sign as ±1 and the
/// sorted word, or `None` when the word vanishes.
pub fn bubble_normalize(
    degrees: &[i32],
    word: &[usize],
    truncation: usize,
) -> Option<(i32, Vec<usize>)> {
    if word.len() > truncation {
        return None;
    }
    let mut w = word.to_vec();
    let mut sign = 1;
    loop {
        let mut swapped = false;
        for i in 0..w.len().saturating_sub(1) {
            if w[i] > w[i + 1] {
                if degrees[w[i]] % 2 != 0 && degrees[w[i + 1]] % 2 != 0 {
                    sign = -sign;
                }
                w.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    for pair in w.windows(2) {
        if pair[0] == pair[1] && degrees[pair[0]] % 2 != 0 {
            return None;
        }
    }
    Some((sign, w))
}

/// Coefficients keyed by (word, exponents).
pub type Coefficients = BTreeMap<(Vec<usize>, Vec<u32>), Rational>;

fn flatten(f: &Section) -> Coefficients {
    let mut out = BTreeMap::new();
    for (w, b) in f.terms() {
        for (e, c) in b.terms() {
            out.insert((w.indices().to_vec(), e.clone()), c.clone());
        }
    }
    out
}

/// True iff `b` lies in the column span of `cols` (exact Gaussian elimination).
pub fn in_span(cols: &[Coefficients], b: &Coefficients) -> bool {
    let mut keys: Vec<&(Vec<usize>, Vec<u32>)> =
        cols.iter().flat_map(|c| c.keys()).chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let index: BTreeMap<_, _> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let rows = keys.len();
    let ncols = cols.len();
    let mut m = vec![vec![Rational::zero(); ncols + 1]; rows];
    for (j, c) in cols.iter().enumerate() {
        for (k, v) in c {
            m[index[k]][j] = v.clone();
        }
    }
    for (k, v) in b {
        m[index[k]][ncols] = v.clone();
    }
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                let pivot = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot).skip(col) {
                    *x -= &factor * p;
                }
            }
        }
        r += 1;
    }
    (r..rows).all(|i| m[i][ncols].is_zero())
}

/// Membership in `I_x^r` by solving `f = Σ c_j (t-x)^α w_m` over generators
/// with `|α| + len(m) ≥ r`.
pub fn in_ideal_power_oracle(f: &Section, x: &Point, r: usize) -> bool {
    let chart = f.chart();
    let n = chart.smooth_dim();
    let max_deg = f
        .terms()
        .filter_map(|(_, b)| b.total_degree())
        .max()
        .unwrap_or(0);
    let shifted: Vec<Section> = (0..n)
        .map(|i| {
            &Section::var(chart, &chart.smooth_names()[i])
                - &Section::constant(chart, x.0[i].clone())
        })
        .collect();
    let mut alphas: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        alphas = alphas
            .into_iter()
            .flat_map(|a| {
                (0..=max_deg).map(move |k| {
                    let mut b = a.clone();
                    b.push(k);
                    b
                })
            })
            .filter(|a| a.iter().sum::<u32>() <= max_deg)
            .collect();
    }
    let mut cols = Vec::new();
    for alpha in &alphas {
        let mut base = Section::one(chart);
        for (i, &k) in alpha.iter().enumerate() {
            base = &base * &shifted[i].pow(k);
        }
        let a: usize = alpha.iter().sum::<u32>() as usize;
        for w in normal_words(chart, chart.truncation()) {
            if a + w.len() >= r {
                let g = &base * &Section::from_term(chart, w, BodyPolynomial::one(n));
                cols.push(flatten(&g));
            }
        }
    }
    in_span(&cols, &flatten(f))
}

/// `X(f)` read off as the first-order part of `f(c + e·X(c))`, where `e` is a
/// fresh coordinate of degree `-|X|`. Uses only substitution and products.
pub fn epsilon_derivative(x: &VectorField, f: &Section) -> Section {
    let chart = x.chart();
    if x.is_zero() {
        return Section::zero(chart);
    }
    let d = x.homogeneous_degree().expect("homogeneous field");
    let smooth: Vec<String> = chart.smooth_names().to_vec();
    let formal: Vec<(String, Degree)> = chart.formal_coords().to_vec();
    let (ext, eps) = if d == Degree(0) {
        let mut s = smooth.clone();
        s.push("__eps".into());
        let ext = Chart::new(s, formal.clone(), chart.truncation() + 1).unwrap();
        (ext, Coord::Smooth(smooth.len()))
    } else {
        let mut fo = formal.clone();
        fo.push(("__eps".into(), -d));
        let ext = Chart::new(smooth.clone(), fo, chart.truncation() + 1).unwrap();
        (ext, Coord::Formal(formal.len()))
    };
    let incl = ChartMorphism::new(
        chart,
        &ext,
        chart
            .coords()
            .map(|c| (c, Section::coordinate(&ext, c)))
            .collect(),
    )
    .unwrap();
    let e = Section::coordinate(&ext, eps);
    let images = chart
        .coords()
        .map(|c| {
            let lifted = x.image(c).substitute(&incl).unwrap();
            (c, &Section::coordinate(&ext, c) + &(&e * &lifted))
        })
        .collect();
    let phi = ChartMorphism::new(chart, &ext, images).unwrap();
    let g = f.substitute(&phi).unwrap();
    let mut out = Section::zero(chart);
    for (w, b) in g.terms() {
        match eps {
            Coord::Smooth(_) if w.len() > chart.truncation() => {}
            Coord::Smooth(k) => {
                for (exps, c) in b.terms() {
                    if exps[k] == 1 {
                        let word = Monomial::from_normal_word(chart, w.indices().to_vec()).unwrap();
                        let body = BodyPolynomial::monomial(exps[..k].to_vec(), c.clone());
                        out = &out + &Section::from_term(chart, word, body);
                    }
                }
            }
            Coord::Formal(k) => {
                let count = w.indices().iter().filter(|&&a| a == k).count();
                if count != 1 {
                    continue;
                }
                let rest: Vec<usize> = w.indices().iter().copied().filter(|&a| a != k).collect();
                let rest = Monomial::from_normal_word(chart, rest).unwrap();
                let sign = koszul_sign(-d, rest.degree(chart));
                let mut body = BodyPolynomial::zero(chart.smooth_dim());
                for (exps, c) in b.terms() {
                    let c = if sign.is_minus() {
                        -c.clone()
                    } else {
                        c.clone()
                    };
                    body = &body + &BodyPolynomial::monomial(exps.clone(), c);
                }
                out = &out + &Section::from_term(chart, rest, body);
            }
        }
    }
    out
}

/// `E(f) = Σ_d d·f_d`, the grading derivation, computed from homogeneous parts.
pub fn euler_derivation(f: &Section) -> Section {
    let mut out = Section::zero(f.chart());
    for (d, part) in f.homogeneous_parts() {
        out = &out + &part.scale(&rat(d.0 as i64));
    }
    out
}

/// `Σ_m c^m_ij c^l_mk + cyclic` for all `i, j, k, l`.
pub fn jacobiator_vanishes(g: &LieAlgebraData) -> bool {
    let n = g.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += g.get(m, i, j) * g.get(l, m, k);
                        s += g.get(m, j, k) * g.get(l, m, i);
                        s += g.get(m, k, i) * g.get(l, m, j);
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Sum of the word-length parts up to `max_len`.
pub fn low_part(f: &Section, max_len: usize) -> Section {
    let mut out = Section::zero(f.chart());
    for l in 0..=max_len {
        out = &out + &f.word_length_part(l);
    }
    out
}

/// Point chart `p(2), q(3), r(5), s(4)` with
/// `Q = p² ∂_q + p³ ∂_r + (r - p q) ∂_s`: nonzero l_1, l_2 and l_3.
pub fn three_term_linfinity(cubic: Rational, mixed: Rational) -> (Arc<Chart>, VectorField) {
    let chart = Chart::build(&[], &[("p", 2), ("q", 3), ("r", 5), ("s", 4)], 4).unwrap();
    let p = Section::var(&chart, "p");
    let q = Section::var(&chart, "q");
    let r = Section::var(&chart, "r");
    let mut images = BTreeMap::new();
    images.insert(Coord::Formal(1), &p * &p);
    images.insert(Coord::Formal(2), (&(&p * &p) * &p).scale(&cubic));
    images.insert(Coord::Formal(3), &r - &(&p * &q).scale(&mixed));
    let field = VectorField::from_images(&chart, images).unwrap();
    (chart, field)
}

/// `so(3)` acting on `R^3`: anchor `ρ[i][a] = sign · Σ_b ε_{iab} x_b`,
/// bracket constants `C^c_{ab} = ε_{abc}`.
pub fn so3_action(sign: i64) -> AlgebroidChartData {
    let n = 3;
    let anchor = (0..n)
        .map(|i| {
            (0..n)
                .map(|a| {
                    let mut p = BodyPolynomial::zero(n);
                    for b in 0..n {
                        let e = levi_civita(i, a, b) * sign;
                        if e != 0 {
                            p = &p + &BodyPolynomial::variable(n, b).scale(&rat(e));
                        }
                    }
                    p
                })
                .collect()
        })
        .collect();
    let structure = (0..n)
        .map(|c| {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| BodyPolynomial::constant(n, rat(levi_civita(a, b, c))))
                        .collect()
                })
                .collect()
        })
        .collect();
    AlgebroidChartData::new(n, n, anchor, structure).unwrap()
}
