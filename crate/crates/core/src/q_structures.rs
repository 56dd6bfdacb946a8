//! Homological vector fields and the algebraic structures they encode.
//!
//! * Lie algebras ↔ degree +1 homological fields on a point with degree-1
//!   generators (Chevalley–Eilenberg differential / derived bracket).
//! * L∞ algebras ↔ homological fields on a formal graded point with
//!   positive-degree generators.
//! * Lie algebroids (chart level) ↔ degree +1 homological fields mixing base
//!   and fiber coordinates.
//!
//! Sign conventions: `Q(ξ^k) = -½ Σ c^k_{ij} ξ^i ξ^j` for a Lie algebra, and
//! `Q(ξ^c) = Σ_n (1/n!) Σ l_n[c][a_1…a_n] ξ^{a_1}…ξ^{a_n}` for L∞ brackets,
//! so the arity-2 bracket of a Lie algebra is `-c`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::body::{rat, ratio, BodyPolynomial, Rational};
use crate::calculus::VectorField;
use crate::error::{Error, Result};
use crate::graded_linear::Degree;
use crate::symmetric_algebra::{normalize, Chart, Coord, Monomial, Section};

/// Structure constants `c^k_{ij}` of `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieAlgebraData {
    dim: usize,
    c: Vec<Rational>,
}

impl LieAlgebraData {
    /// Builds from a dense closure `(k, i, j) ↦ c^k_{ij}`; checks antisymmetry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> Rational) -> Result<Self> {
        let mut c = Vec::with_capacity(dim * dim * dim);
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    c.push(f(k, i, j));
                }
            }
        }
        let g = LieAlgebraData { dim, c };
        g.check_antisymmetric()?;
        Ok(g)
    }

    /// Builds from sparse `(k, i, j, value)` entries; unlisted entries are zero.
    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self> {
        let mut c = vec![Rational::zero(); dim * dim * dim];
        for (k, i, j, v) in entries {
            if k >= dim || i >= dim || j >= dim {
                return Err(Error::Precondition(format!(
                    "structure constant index ({k}, {i}, {j}) out of range for dimension {dim}"
                )));
            }
            c[(k * dim + i) * dim + j] = v;
        }
        let g = LieAlgebraData { dim, c };
        g.check_antisymmetric()?;
        Ok(g)
    }

    /// The abelian Lie algebra.
    pub fn abelian(dim: usize) -> Self {
        LieAlgebraData {
            dim,
            c: vec![Rational::zero(); dim * dim * dim],
        }
    }

    /// `so(3)` with `c^k_{ij} = ε_{ijk}`.
    pub fn so3() -> Self {
        Self::from_fn(3, |k, i, j| rat(levi_civita(i, j, k))).expect("antisymmetric")
    }

    fn check_antisymmetric(&self) -> Result<()> {
        for k in 0..self.dim {
            for i in 0..self.dim {
                for j in i..self.dim {
                    if *self.get(k, i, j) != -self.get(k, j, i) {
                        return Err(Error::NotAntisymmetric(format!(
                            "c[{k}][{i}][{j}] = {} but c[{k}][{j}][{i}] = {}",
                            self.get(k, i, j),
                            self.get(k, j, i)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.c[(k * self.dim + i) * self.dim + j]
    }

    /// Nonzero entries `(k, i, j, c^k_{ij})` in index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> {
        let n = self.dim;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(idx, v)| (idx / (n * n), (idx / n) % n, idx % n, v))
    }
}

/// `ε_{ijk}` for indices in `0..3`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Outcome of the homological check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologicalCheck {
    /// Degrees of the homogeneous parts of `Q` other than `+1`.
    pub off_degree_parts: Vec<Degree>,
    /// Nonzero images of `[Q, Q]`, by coordinate.
    pub residual: BTreeMap<Coord, Section>,
}

impl HomologicalCheck {
    pub fn is_homological(&self) -> bool {
        self.off_degree_parts.is_empty() && self.residual.is_empty()
    }
}

/// Checks that `Q` has degree +1 and `[Q, Q] = 2Q² = 0` up to truncation.
pub fn is_homological(q: &VectorField) -> HomologicalCheck {
    let off_degree_parts = q
        .degree_parts()
        .into_keys()
        .filter(|d| *d != Degree(1))
        .collect();
    let qq = q.commutator(q).expect("same chart");
    let residual = qq
        .images()
        .filter(|(_, s)| !s.is_zero())
        .map(|(c, s)| (c, s.clone()))
        .collect();
    HomologicalCheck {
        off_degree_parts,
        residual,
    }
}

fn ce_chart(dim: usize, truncation: usize) -> Result<Arc<Chart>> {
    Chart::new(
        Vec::new(),
        (1..=dim).map(|i| (format!("xi{i}"), Degree(1))).collect(),
        truncation,
    )
}

/// Quadratic images `-½ Σ C^c_{ab} ξ^a ξ^b = -Σ_{a<b} C^c_{ab} ξ^a ξ^b`.
fn quadratic_images(
    chart: &Arc<Chart>,
    rank: usize,
    coeff: impl Fn(usize, usize, usize) -> BodyPolynomial,
) -> Vec<Section> {
    (0..rank)
        .map(|c| {
            let mut img = Section::zero(chart);
            for a in 0..rank {
                for b in a + 1..rank {
                    let body = coeff(c, a, b);
                    if body.is_zero() {
                        continue;
                    }
                    let word = Monomial::from_normal_word(chart, vec![a, b])
                        .expect("distinct ascending letters");
                    img = &img + &Section::from_term(chart, word, -&body);
                }
            }
            img
        })
        .collect()
}

/// The Chevalley–Eilenberg field of a Lie algebra on the point chart with
/// generators `xi1..xin` of degree 1. Truncation is `max(3, n)`, which keeps
/// the whole exterior algebra.
pub fn chevalley_eilenberg(g: &LieAlgebraData) -> Result<(Arc<Chart>, VectorField)> {
    g.check_antisymmetric()?;
    let n = g.dim();
    let chart = ce_chart(n, n.max(3))?;
    let images = quadratic_images(&chart, n, |c, a, b| {
        BodyPolynomial::constant(0, g.get(c, a, b).clone())
    });
    let q = VectorField::new(&chart, Vec::new(), images)?;
    Ok((chart, q))
}

fn require_lie_point_chart(q: &VectorField) -> Result<()> {
    let chart = q.chart();
    if !chart.is_point() {
        return Err(Error::Precondition(
            "derived bracket needs a chart without smooth coordinates".into(),
        ));
    }
    if chart.formal_coords().iter().any(|(_, d)| *d != Degree(1)) {
        return Err(Error::Precondition(
            "derived bracket needs all generators of degree 1".into(),
        ));
    }
    Ok(())
}

/// The derived bracket `[e_i, e_j] ↔ [[Q, ∂_i], ∂_j]` read off as structure constants.
pub fn derived_bracket(q: &VectorField) -> Result<LieAlgebraData> {
    require_lie_point_chart(q)?;
    let off: Vec<Degree> = q
        .degree_parts()
        .into_keys()
        .filter(|d| *d != Degree(1))
        .collect();
    if !off.is_empty() {
        return Err(Error::DegreeMismatch(format!(
            "field has homogeneous parts of degree {off:?}, expected only +1"
        )));
    }
    let chart = q.chart();
    let n = chart.formal_dim();
    let partials: Vec<VectorField> = (0..n)
        .map(|a| VectorField::coordinate_derivation(chart, Coord::Formal(a)))
        .collect::<Result<_>>()?;
    let mut c = vec![Rational::zero(); n * n * n];
    for i in 0..n {
        let inner = q.commutator(&partials[i])?;
        for j in 0..n {
            let bracket = inner.commutator(&partials[j])?;
            for k in 0..n {
                let img = bracket.image(Coord::Formal(k));
                if img.terms().any(|(w, _)| !w.is_empty()) {
                    return Err(Error::Precondition(
                        "derived bracket is not constant".into(),
                    ));
                }
                let v = img.body_projection().constant_term();
                c[(k * n + i) * n + j] = v;
            }
        }
    }
    LieAlgebraData::from_fn(n, |k, i, j| c[(k * n + i) * n + j].clone())
}

/// Multi-brackets `l_n[c][a_1…a_n]` of an L∞ structure on a formal point.
///
/// Stored on normal-ordered argument lists; [`LInfinityBrackets::get`]
/// returns the graded-symmetric extension to arbitrary orderings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInfinityBrackets {
    chart: Arc<Chart>,
    brackets: BTreeMap<usize, BTreeMap<(usize, Vec<usize>), Rational>>,
}

impl LInfinityBrackets {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// Arities with at least one nonzero bracket coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.brackets
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(k, _)| *k)
            .collect()
    }

    /// Nonzero coefficients of arity `n`, keyed by `(target, sorted arguments)`.
    pub fn arity(&self, n: usize) -> impl Iterator<Item = (&(usize, Vec<usize>), &Rational)> {
        self.brackets.get(&n).into_iter().flat_map(|m| m.iter())
    }

    /// `l_n[target][args]` for arguments in any order.
    pub fn get(&self, target: usize, args: &[usize]) -> Result<Rational> {
        let Some((sign, m)) = normalize(&self.chart, args)? else {
            return Ok(Rational::zero());
        };
        let v = self
            .brackets
            .get(&args.len())
            .and_then(|b| b.get(&(target, m.indices().to_vec())))
            .cloned()
            .unwrap_or_else(Rational::zero);
        Ok(if sign.is_minus() { -v } else { v })
    }

    /// Rebuilds the homological vector field from the brackets.
    pub fn to_vector_field(&self) -> Result<VectorField> {
        let chart = &self.chart;
        let mut images = vec![Section::zero(chart); chart.formal_dim()];
        for m in self.brackets.values() {
            for ((target, args), v) in m {
                let word = Monomial::from_normal_word(chart, args.clone())?;
                let weight: u64 = word
                    .multiplicities()
                    .iter()
                    .map(|(_, k)| factorial(*k as u64))
                    .product();
                let coeff = v / Rational::from_integer(weight.into());
                images[*target] = &images[*target]
                    + &Section::from_term(chart, word, BodyPolynomial::constant(0, coeff));
            }
        }
        VectorField::new(chart, Vec::new(), images)
    }

    /// The arity-2 brackets of a Lie algebra under the Chevalley–Eilenberg
    /// convention: `l_2[k][i][j] = -c^k_{ij}`.
    pub fn from_lie_algebra(g: &LieAlgebraData) -> Result<Self> {
        let (_, q) = chevalley_eilenberg(g)?;
        extract_linfinity(&q, 2)
    }
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

fn require_formal_point(q: &VectorField) -> Result<()> {
    let chart = q.chart();
    if !chart.is_point() {
        return Err(Error::Precondition(
            "L∞ extraction needs a chart without smooth coordinates".into(),
        ));
    }
    if let Some((name, d)) = chart.formal_coords().iter().find(|(_, d)| d.0 <= 0) {
        return Err(Error::Precondition(format!(
            "L∞ extraction needs positive generator degrees; `{name}` has degree {d}"
        )));
    }
    Ok(())
}

/// Reads the graded-symmetric Taylor coefficients of `Q` up to `max_arity`.
pub fn extract_linfinity(q: &VectorField, max_arity: usize) -> Result<LInfinityBrackets> {
    require_formal_point(q)?;
    let chart = q.chart();
    if max_arity > chart.truncation() {
        return Err(Error::BeyondTruncation {
            requested: max_arity,
            truncation: chart.truncation(),
        });
    }
    let off: Vec<Degree> = q
        .degree_parts()
        .into_keys()
        .filter(|d| *d != Degree(1))
        .collect();
    if !off.is_empty() {
        return Err(Error::DegreeMismatch(format!(
            "field has homogeneous parts of degree {off:?}, expected only +1"
        )));
    }
    let mut brackets: BTreeMap<usize, BTreeMap<(usize, Vec<usize>), Rational>> =
        (1..=max_arity).map(|n| (n, BTreeMap::new())).collect();
    for target in 0..chart.formal_dim() {
        for (word, body) in q.image(Coord::Formal(target)).terms() {
            let n = word.len();
            if n == 0 || n > max_arity {
                continue;
            }
            let coeff = body.constant_term();
            let weight: u64 = word
                .multiplicities()
                .iter()
                .map(|(_, k)| factorial(*k as u64))
                .product();
            brackets.get_mut(&n).expect("arity in range").insert(
                (target, word.indices().to_vec()),
                coeff * Rational::from_integer(weight.into()),
            );
        }
    }
    Ok(LInfinityBrackets {
        chart: chart.clone(),
        brackets,
    })
}

/// The word-length-`k` part of `½[Q, Q]` on each coordinate; zero images omitted.
pub fn homotopy_jacobi_residual(q: &VectorField, k: usize) -> Result<BTreeMap<Coord, Section>> {
    let chart = q.chart();
    if k > chart.truncation() {
        return Err(Error::BeyondTruncation {
            requested: k,
            truncation: chart.truncation(),
        });
    }
    let half = q.commutator(q)?.scale(&ratio(1, 2));
    Ok(half
        .images()
        .map(|(c, s)| (c, s.word_length_part(k)))
        .filter(|(_, s)| !s.is_zero())
        .collect())
}

/// Chart-level Lie algebroid data on a trivialized bundle of rank `m` over
/// `n` base coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebroidChartData {
    base_dim: usize,
    rank: usize,
    /// `anchor[i][a]`: component `i` of the anchor of the frame element `e_a`.
    anchor: Vec<Vec<BodyPolynomial>>,
    /// `structure[c][a][b]`: `[e_a, e_b] = Σ_c C^c_{ab} e_c`.
    structure: Vec<Vec<Vec<BodyPolynomial>>>,
}

impl AlgebroidChartData {
    pub fn new(
        base_dim: usize,
        rank: usize,
        anchor: Vec<Vec<BodyPolynomial>>,
        structure: Vec<Vec<Vec<BodyPolynomial>>>,
    ) -> Result<Self> {
        let arity = |expected: usize, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::ArityMismatch { expected, found })
            }
        };
        arity(base_dim, anchor.len())?;
        for row in &anchor {
            arity(rank, row.len())?;
            for p in row {
                arity(base_dim, p.nvars())?;
            }
        }
        arity(rank, structure.len())?;
        for plane in &structure {
            arity(rank, plane.len())?;
            for row in plane {
                arity(rank, row.len())?;
                for p in row {
                    arity(base_dim, p.nvars())?;
                }
            }
        }
        for (c, plane) in structure.iter().enumerate() {
            for (a, row) in plane.iter().enumerate() {
                for (b, entry) in row.iter().enumerate().skip(a) {
                    if *entry != -&plane[b][a] {
                        return Err(Error::NotAntisymmetric(format!(
                            "C[{c}][{a}][{b}] = {} but C[{c}][{b}][{a}] = {}",
                            entry, plane[b][a]
                        )));
                    }
                }
            }
        }
        Ok(AlgebroidChartData {
            base_dim,
            rank,
            anchor,
            structure,
        })
    }

    /// Zero anchor and bracket.
    pub fn zero(base_dim: usize, rank: usize) -> Self {
        let z = BodyPolynomial::zero(base_dim);
        AlgebroidChartData {
            base_dim,
            rank,
            anchor: vec![vec![z.clone(); rank]; base_dim],
            structure: vec![vec![vec![z; rank]; rank]; rank],
        }
    }

    /// The tangent algebroid of `R^n`: identity anchor, zero bracket.
    pub fn tangent(n: usize) -> Self {
        let mut a = Self::zero(n, n);
        for i in 0..n {
            a.anchor[i][i] = BodyPolynomial::one(n);
        }
        a
    }

    /// A Lie algebra as an algebroid over a point.
    pub fn from_lie_algebra(g: &LieAlgebraData) -> Self {
        let n = g.dim();
        let mut a = Self::zero(0, n);
        for (k, i, j, v) in g.entries() {
            a.structure[k][i][j] = BodyPolynomial::constant(0, v.clone());
        }
        a
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn anchor(&self, i: usize, a: usize) -> &BodyPolynomial {
        &self.anchor[i][a]
    }

    pub fn structure(&self, c: usize, a: usize, b: usize) -> &BodyPolynomial {
        &self.structure[c][a][b]
    }

    /// Replaces one anchor entry.
    pub fn with_anchor(mut self, i: usize, a: usize, p: BodyPolynomial) -> Result<Self> {
        if p.nvars() != self.base_dim {
            return Err(Error::ArityMismatch {
                expected: self.base_dim,
                found: p.nvars(),
            });
        }
        self.anchor[i][a] = p;
        Ok(self)
    }
}

/// `Q = Σ ρ^i_a ξ^a ∂/∂x_i - ½ Σ C^c_{ab} ξ^a ξ^b ∂/∂ξ^c` on the chart
/// `(x1..xn; xi1..xim)` with `ξ` of degree 1.
pub fn algebroid_q(a: &AlgebroidChartData, truncation: usize) -> Result<(Arc<Chart>, VectorField)> {
    if truncation < 3 {
        return Err(Error::Precondition(format!(
            "algebroid fields need truncation at least 3, got {truncation}"
        )));
    }
    let a = AlgebroidChartData::new(a.base_dim, a.rank, a.anchor.clone(), a.structure.clone())?;
    let (n, m) = (a.base_dim, a.rank);
    let chart = Chart::new(
        (1..=n).map(|i| format!("x{i}")).collect(),
        (1..=m).map(|i| (format!("xi{i}"), Degree(1))).collect(),
        truncation,
    )?;
    let smooth = (0..n)
        .map(|i| {
            let mut img = Section::zero(&chart);
            for b in 0..m {
                let word = Monomial::from_normal_word(&chart, vec![b]).expect("single letter");
                img = &img + &Section::from_term(&chart, word, a.anchor[i][b].clone());
            }
            img
        })
        .collect();
    let formal = quadratic_images(&chart, m, |c, x, y| a.structure[c][x][y].clone());
    let q = VectorField::new(&chart, smooth, formal)?;
    Ok((chart, q))
}

/// The de Rham differential `d = Σ dx_i ∂/∂x_i` on the chart `(x1..xn; dx1..dxn)`.
pub fn exterior_differential_chart(
    n: usize,
    truncation: usize,
) -> Result<(Arc<Chart>, VectorField)> {
    if n == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    let chart = Chart::new(
        (1..=n).map(|i| format!("x{i}")).collect(),
        (1..=n).map(|i| (format!("dx{i}"), Degree(1))).collect(),
        truncation,
    )?;
    let smooth = (0..n)
        .map(|i| Section::coordinate(&chart, Coord::Formal(i)))
        .collect();
    let formal = vec![Section::zero(&chart); n];
    let d = VectorField::new(&chart, smooth, formal)?;
    Ok((chart, d))
}
