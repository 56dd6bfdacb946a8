//! Graded vector fields on a chart.
//!
//! A vector field is stored as its coordinate images
//! `X = Σ X(t_i) ∂/∂t_i + Σ X(w_α) ∂/∂w_α` and acts on sections by the
//! graded Leibniz rule. Derivations act from the left: passing a part of
//! degree `k` over a factor of degree `m` costs `(-1)^{km}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::body::{BodyPolynomial, Rational};
use crate::error::{Error, Result};
use crate::graded_linear::{koszul_sign, Degree};
use crate::symmetric_algebra::{Chart, Coord, Monomial, Point, Section};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    chart: Arc<Chart>,
    smooth: Vec<Section>,
    formal: Vec<Section>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, smooth: Vec<Section>, formal: Vec<Section>) -> Result<Self> {
        if smooth.len() != chart.smooth_dim() {
            return Err(Error::ArityMismatch {
                expected: chart.smooth_dim(),
                found: smooth.len(),
            });
        }
        if formal.len() != chart.formal_dim() {
            return Err(Error::ArityMismatch {
                expected: chart.formal_dim(),
                found: formal.len(),
            });
        }
        for s in smooth.iter().chain(&formal) {
            if !(Arc::ptr_eq(s.chart(), chart) || **s.chart() == **chart) {
                return Err(Error::ChartMismatch);
            }
        }
        Ok(VectorField {
            chart: chart.clone(),
            smooth,
            formal,
        })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        VectorField {
            chart: chart.clone(),
            smooth: vec![Section::zero(chart); chart.smooth_dim()],
            formal: vec![Section::zero(chart); chart.formal_dim()],
        }
    }

    /// Images keyed by coordinate; missing coordinates map to zero.
    pub fn from_images(chart: &Arc<Chart>, images: BTreeMap<Coord, Section>) -> Result<Self> {
        let mut x = Self::zero(chart);
        for (c, s) in images {
            match c {
                Coord::Smooth(i) if i < chart.smooth_dim() => x.smooth[i] = s,
                Coord::Formal(a) if a < chart.formal_dim() => x.formal[a] = s,
                _ => {
                    return Err(Error::Precondition(format!(
                        "coordinate {c:?} not on chart"
                    )))
                }
            }
        }
        Self::new(chart, x.smooth, x.formal)
    }

    /// `∂/∂t_i` or `∂/∂w_α`.
    pub fn coordinate_derivation(chart: &Arc<Chart>, coord: Coord) -> Result<Self> {
        let in_range = match coord {
            Coord::Smooth(i) => i < chart.smooth_dim(),
            Coord::Formal(a) => a < chart.formal_dim(),
        };
        if !in_range {
            return Err(Error::UnknownCoordinate(format!("{coord:?}")));
        }
        let mut x = Self::zero(chart);
        *x.image_mut(coord) = Section::one(chart);
        Ok(x)
    }

    pub fn partial(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        Self::coordinate_derivation(chart, chart.lookup(name)?)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn image(&self, c: Coord) -> &Section {
        match c {
            Coord::Smooth(i) => &self.smooth[i],
            Coord::Formal(a) => &self.formal[a],
        }
    }

    fn image_mut(&mut self, c: Coord) -> &mut Section {
        match c {
            Coord::Smooth(i) => &mut self.smooth[i],
            Coord::Formal(a) => &mut self.formal[a],
        }
    }

    /// `(coordinate, image)` pairs in chart order.
    pub fn images(&self) -> impl Iterator<Item = (Coord, &Section)> {
        self.chart.coords().map(move |c| (c, self.image(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.smooth.iter().chain(&self.formal).all(Section::is_zero)
    }

    fn same_chart(&self, other: &VectorField) -> bool {
        Arc::ptr_eq(&self.chart, &other.chart) || self.chart == other.chart
    }

    fn map_images(&self, f: impl Fn(Coord, &Section) -> Section) -> VectorField {
        let mut out = self.clone();
        for c in self.chart.coords() {
            let img = f(c, self.image(c));
            *out.image_mut(c) = img;
        }
        out
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if !self.same_chart(other) {
            return Err(Error::ChartMismatch);
        }
        Ok(self.map_images(|c, s| s + other.image(c)))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        if !self.same_chart(other) {
            return Err(Error::ChartMismatch);
        }
        Ok(self.map_images(|c, s| s - other.image(c)))
    }

    pub fn scale(&self, c: &Rational) -> VectorField {
        self.map_images(|_, s| s.scale(c))
    }

    /// The field `f·X`, with images `f·X(z)`.
    pub fn left_multiply(&self, f: &Section) -> Result<VectorField> {
        if !(Arc::ptr_eq(f.chart(), &self.chart) || **f.chart() == *self.chart) {
            return Err(Error::ChartMismatch);
        }
        Ok(self.map_images(|_, s| f * s))
    }

    /// Homogeneous parts: part `k` sends each coordinate `z` to the degree
    /// `|z| + k` component of `X(z)`. Zero parts are omitted.
    pub fn degree_parts(&self) -> BTreeMap<Degree, VectorField> {
        let mut parts: BTreeMap<Degree, VectorField> = BTreeMap::new();
        for c in self.chart.coords() {
            let zdeg = self.chart.coord_degree(c);
            for (d, s) in self.image(c).homogeneous_parts() {
                let k = d - zdeg;
                let part = parts.entry(k).or_insert_with(|| Self::zero(&self.chart));
                *part.image_mut(c) = s;
            }
        }
        parts
    }

    /// Degree of a nonzero homogeneous field.
    pub fn homogeneous_degree(&self) -> Option<Degree> {
        let parts = self.degree_parts();
        if parts.len() == 1 {
            parts.keys().next().copied()
        } else {
            None
        }
    }

    /// Even and odd parts (by parity of degree). Only parity enters the signs.
    fn parity_parts(&self) -> [(Degree, VectorField); 2] {
        let mut even = Self::zero(&self.chart);
        let mut odd = Self::zero(&self.chart);
        for (k, part) in self.degree_parts() {
            let target = if k.is_odd() { &mut odd } else { &mut even };
            *target = target.add(&part).expect("same chart");
        }
        [(Degree(0), even), (Degree(1), odd)]
    }

    /// `X(f)` by the graded Leibniz rule.
    pub fn apply(&self, f: &Section) -> Result<Section> {
        if !(Arc::ptr_eq(f.chart(), &self.chart) || **f.chart() == *self.chart) {
            return Err(Error::ChartMismatch);
        }
        let mut out = Section::zero(&self.chart);
        for (k, part) in self.parity_parts() {
            if !part.is_zero() {
                out = &out + &part.apply_with_parity(k, f);
            }
        }
        Ok(out)
    }

    fn apply_with_parity(&self, k: Degree, f: &Section) -> Section {
        let chart = &self.chart;
        let ns = chart.smooth_dim();
        let mut out = Section::zero(chart);
        for (word, body) in f.terms() {
            let word_section = Section::from_term(chart, word.clone(), BodyPolynomial::one(ns));
            // body part: Σ_i X(t_i) ∂body/∂t_i
            for i in 0..ns {
                if self.smooth[i].is_zero() {
                    continue;
                }
                let d = body.partial(i);
                if d.is_zero() {
                    continue;
                }
                let term = &(&self.smooth[i] * &Section::from_body(chart, d)) * &word_section;
                out = &out + &term;
            }
            // word part: factor by factor, left to right
            let letters = word.indices();
            let mut prefix_degree = Degree::ZERO;
            for (j, &a) in letters.iter().enumerate() {
                let image = &self.formal[a];
                if !image.is_zero() {
                    let prefix = Section::from_term(
                        chart,
                        Monomial::from_normal_word(chart, letters[..j].to_vec())
                            .expect("subword of a normal word"),
                        body.clone(),
                    );
                    let suffix = Section::from_term(
                        chart,
                        Monomial::from_normal_word(chart, letters[j + 1..].to_vec())
                            .expect("subword of a normal word"),
                        BodyPolynomial::one(ns),
                    );
                    let mut term = &(&prefix * image) * &suffix;
                    if koszul_sign(k, prefix_degree).is_minus() {
                        term = -&term;
                    }
                    out = &out + &term;
                }
                prefix_degree = prefix_degree + chart.formal_degree(a);
            }
        }
        out
    }

    /// Graded commutator `[X, Y] = XY - (-1)^{|X||Y|} YX`, extended
    /// bilinearly over homogeneous parts.
    pub fn commutator(&self, other: &VectorField) -> Result<VectorField> {
        if !self.same_chart(other) {
            return Err(Error::ChartMismatch);
        }
        let mut out = Self::zero(&self.chart);
        for (p, x) in self.parity_parts() {
            if x.is_zero() {
                continue;
            }
            for (q, y) in other.parity_parts() {
                if y.is_zero() {
                    continue;
                }
                let sign = koszul_sign(p, q);
                for c in self.chart.coords() {
                    let xy = x.apply_with_parity(p, y.image(c));
                    let yx = y.apply_with_parity(q, x.image(c));
                    let term = if sign.is_minus() {
                        &xy + &yx
                    } else {
                        &xy - &yx
                    };
                    let img = out.image_mut(c);
                    *img = &*img + &term;
                }
            }
        }
        Ok(out)
    }

    /// The tangent vector `ev_x ∘ X` at a point.
    pub fn tangent_vector(&self, x: &Point) -> Result<TangentVector> {
        let smooth = self
            .smooth
            .iter()
            .map(|s| s.value(x))
            .collect::<Result<Vec<_>>>()?;
        let formal = self
            .formal
            .iter()
            .map(|s| s.value(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(TangentVector {
            point: x.clone(),
            smooth,
            formal,
        })
    }
}

/// Coefficients of a tangent vector against `∂/∂t_i|_x` and `∂/∂w_α|_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentVector {
    pub point: Point,
    pub smooth: Vec<Rational>,
    pub formal: Vec<Rational>,
}

impl TangentVector {
    pub fn coefficient(&self, c: Coord) -> &Rational {
        match c {
            Coord::Smooth(i) => &self.smooth[i],
            Coord::Formal(a) => &self.formal[a],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.smooth.iter().chain(&self.formal).all(Zero::is_zero)
    }

    /// Applies the tangent vector to a section: `X_x(f) = ev_x(X(f))`.
    ///
    /// Only the body and the single-letter components of `f` survive evaluation.
    pub fn apply(&self, f: &Section) -> Result<Rational> {
        let chart = f.chart();
        if self.smooth.len() != chart.smooth_dim() || self.formal.len() != chart.formal_dim() {
            return Err(Error::ArityMismatch {
                expected: chart.smooth_dim() + chart.formal_dim(),
                found: self.smooth.len() + self.formal.len(),
            });
        }
        let x = self.point.coords();
        let f0 = f.body_projection();
        let mut total = Rational::zero();
        for (i, c) in self.smooth.iter().enumerate() {
            total += c * f0.partial(i).eval(x);
        }
        for (a, c) in self.formal.iter().enumerate() {
            let letter = Monomial::from_normal_word(chart, vec![a])?;
            total += c * f.component(&letter).eval(x);
        }
        Ok(total)
    }
}
