//! Sections of a graded domain: polynomial bodies tensored with a
//! word-length-truncated graded symmetric algebra on the formal coordinates.
//!
//! A [`Section`] is stored in its unique normal form
//! `f = f_0 + Σ f_{α_1…α_K} w_{α_1}…w_{α_K}` with ascending generator
//! indices, so equality of sections is equality of term maps.
//!
//! Truncation: every product drops words longer than the chart's
//! truncation `N`. Operations that never shorten words (products,
//! substitutions, derivations whose coordinate images carry no pure-body
//! part on formal coordinates) are exact modulo words longer than `N`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::body::{BodyPolynomial, Rational};
use crate::error::{Error, Result};
use crate::graded_linear::{koszul_sign, Degree, GradedDimension, Sign};

/// A coordinate of a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    /// Degree-zero coordinate `t_i`.
    Smooth(usize),
    /// Formal coordinate `w_α` of nonzero degree.
    Formal(usize),
}

/// Named coordinates `(t_i, w_α)` with a word-length truncation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    smooth: Vec<String>,
    formal: Vec<(String, Degree)>,
    truncation: usize,
}

impl Chart {
    pub fn new(
        smooth: Vec<String>,
        formal: Vec<(String, Degree)>,
        truncation: usize,
    ) -> Result<Arc<Chart>> {
        let mut seen = std::collections::BTreeSet::new();
        for name in smooth.iter().chain(formal.iter().map(|(n, _)| n)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateCoordinate(name.clone()));
            }
        }
        if let Some((name, _)) = formal.iter().find(|(_, d)| *d == Degree::ZERO) {
            return Err(Error::ZeroDegreeFormal(name.clone()));
        }
        Ok(Arc::new(Chart {
            smooth,
            formal,
            truncation,
        }))
    }

    /// Convenience constructor from string slices.
    pub fn build(smooth: &[&str], formal: &[(&str, i32)], truncation: usize) -> Result<Arc<Chart>> {
        Chart::new(
            smooth.iter().map(|s| s.to_string()).collect(),
            formal
                .iter()
                .map(|(s, d)| (s.to_string(), Degree(*d)))
                .collect(),
            truncation,
        )
    }

    pub fn smooth_names(&self) -> &[String] {
        &self.smooth
    }

    pub fn formal_coords(&self) -> &[(String, Degree)] {
        &self.formal
    }

    pub fn smooth_dim(&self) -> usize {
        self.smooth.len()
    }

    pub fn formal_dim(&self) -> usize {
        self.formal.len()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// A chart over a single point: no smooth coordinates.
    pub fn is_point(&self) -> bool {
        self.smooth.is_empty()
    }

    pub fn formal_degree(&self, a: usize) -> Degree {
        self.formal[a].1
    }

    pub fn coord(&self, name: &str) -> Option<Coord> {
        if let Some(i) = self.smooth.iter().position(|n| n == name) {
            return Some(Coord::Smooth(i));
        }
        self.formal
            .iter()
            .position(|(n, _)| n == name)
            .map(Coord::Formal)
    }

    pub fn lookup(&self, name: &str) -> Result<Coord> {
        self.coord(name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub fn coord_name(&self, c: Coord) -> &str {
        match c {
            Coord::Smooth(i) => &self.smooth[i],
            Coord::Formal(a) => &self.formal[a].0,
        }
    }

    pub fn coord_degree(&self, c: Coord) -> Degree {
        match c {
            Coord::Smooth(_) => Degree::ZERO,
            Coord::Formal(a) => self.formal[a].1,
        }
    }

    /// All coordinates, smooth first, in chart order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.smooth.len())
            .map(Coord::Smooth)
            .chain((0..self.formal.len()).map(Coord::Formal))
    }

    /// The dimension sequence `(p_j)`.
    pub fn dimension(&self) -> GradedDimension {
        GradedDimension::from_pairs(
            std::iter::once((Degree::ZERO, self.smooth.len() as u64))
                .chain(self.formal.iter().map(|(_, d)| (*d, 1))),
        )
    }

    /// Same coordinates with a different truncation.
    pub fn with_truncation(&self, truncation: usize) -> Arc<Chart> {
        Arc::new(Chart {
            truncation,
            ..self.clone()
        })
    }
}

/// A normal-ordered word `w_{α_1}…w_{α_K}` with `α_1 ≤ … ≤ α_K`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, chart: &Chart) -> Degree {
        self.0.iter().map(|&a| chart.formal_degree(a)).sum()
    }

    /// Builds a monomial from an already-normal word; rejects anything else.
    pub fn from_normal_word(chart: &Chart, word: Vec<usize>) -> Result<Self> {
        for &a in &word {
            if a >= chart.formal_dim() {
                return Err(Error::UnknownIndex {
                    index: a,
                    len: chart.formal_dim(),
                });
            }
        }
        let sorted = word.windows(2).all(|p| p[0] <= p[1]);
        let odd_repeat = word
            .windows(2)
            .any(|p| p[0] == p[1] && chart.formal_degree(p[0]).is_odd());
        if !sorted || odd_repeat || word.len() > chart.truncation() {
            return Err(Error::Precondition(format!(
                "word {word:?} is not a normal-ordered monomial within truncation"
            )));
        }
        Ok(Monomial(word))
    }

    /// Multiplicities of each index, in ascending index order.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &a in &self.0 {
            match out.last_mut() {
                Some((b, n)) if *b == a => *n += 1,
                _ => out.push((a, 1)),
            }
        }
        out
    }
}

/// Sorts a word of formal indices into normal order.
///
/// Each adjacent transposition of `u, v` contributes `(-1)^{|u||v|}`.
/// Returns `None` when the word vanishes: an odd generator repeats, or the
/// word is longer than the chart's truncation.
pub fn normalize(chart: &Chart, word: &[usize]) -> Result<Option<(Sign, Monomial)>> {
    for &a in word {
        if a >= chart.formal_dim() {
            return Err(Error::UnknownIndex {
                index: a,
                len: chart.formal_dim(),
            });
        }
    }
    if word.len() > chart.truncation() {
        return Ok(None);
    }
    let mut w = word.to_vec();
    let mut sign = Sign::Plus;
    // insertion sort; each swap is an adjacent transposition
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            sign = sign * koszul_sign(chart.formal_degree(w[j - 1]), chart.formal_degree(w[j]));
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    if w.windows(2)
        .any(|p| p[0] == p[1] && chart.formal_degree(p[0]).is_odd())
    {
        return Ok(None);
    }
    Ok(Some((sign, Monomial(w))))
}

/// Rational values of the smooth coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn origin(n: usize) -> Self {
        Point(vec![Rational::zero(); n])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    fn check(&self, chart: &Chart) -> Result<()> {
        if self.0.len() != chart.smooth_dim() {
            return Err(Error::ArityMismatch {
                expected: chart.smooth_dim(),
                found: self.0.len(),
            });
        }
        Ok(())
    }
}

/// Element of the section algebra of a chart, in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Section {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, BodyPolynomial>,
}

impl Section {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        Section {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::constant(chart, Rational::one())
    }

    pub fn constant(chart: &Arc<Chart>, c: Rational) -> Self {
        Self::from_body(chart, BodyPolynomial::constant(chart.smooth_dim(), c))
    }

    pub fn from_body(chart: &Arc<Chart>, body: BodyPolynomial) -> Self {
        Self::from_term(chart, Monomial::empty(), body)
    }

    /// `body · word`. Words beyond the truncation give zero.
    pub fn from_term(chart: &Arc<Chart>, word: Monomial, body: BodyPolynomial) -> Self {
        assert_eq!(body.nvars(), chart.smooth_dim(), "body arity");
        let mut s = Self::zero(chart);
        if word.len() <= chart.truncation() && !body.is_zero() {
            s.terms.insert(word, body);
        }
        s
    }

    pub fn coordinate(chart: &Arc<Chart>, c: Coord) -> Self {
        match c {
            Coord::Smooth(i) => {
                Self::from_body(chart, BodyPolynomial::variable(chart.smooth_dim(), i))
            }
            Coord::Formal(a) => Self::from_term(
                chart,
                Monomial(vec![a]),
                BodyPolynomial::one(chart.smooth_dim()),
            ),
        }
    }

    /// Coordinate by name; panics on unknown names (for tests and examples).
    pub fn var(chart: &Arc<Chart>, name: &str) -> Self {
        Self::coordinate(chart, chart.lookup(name).expect("unknown coordinate"))
    }

    /// `c · (product of the given word)`, normal-ordering with Koszul signs.
    pub fn word(chart: &Arc<Chart>, c: Rational, word: &[usize]) -> Result<Self> {
        match normalize(chart, word)? {
            None => Ok(Self::zero(chart)),
            Some((sign, m)) => {
                let c = if sign.is_minus() { -c } else { c };
                Ok(Self::from_term(
                    chart,
                    m,
                    BodyPolynomial::constant(chart.smooth_dim(), c),
                ))
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn same_chart(&self, other: &Section) -> bool {
        Arc::ptr_eq(&self.chart, &other.chart) || self.chart == other.chart
    }

    fn ensure_same_chart(&self, other: &Section) -> Result<()> {
        if self.same_chart(other) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BodyPolynomial)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The body attached to `word` (zero if absent).
    pub fn component(&self, word: &Monomial) -> BodyPolynomial {
        self.terms
            .get(word)
            .cloned()
            .unwrap_or_else(|| BodyPolynomial::zero(self.chart.smooth_dim()))
    }

    pub(crate) fn add_term(&mut self, word: Monomial, body: BodyPolynomial) {
        if body.is_zero() || word.len() > self.chart.truncation() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(body);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &body;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Section {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        Section {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, b)| (m.clone(), b.scale(c)))
                .collect(),
        }
    }

    /// Product in the truncated graded symmetric algebra.
    pub fn multiply(&self, other: &Section) -> Result<Section> {
        self.ensure_same_chart(other)?;
        let chart = &self.chart;
        let n = chart.truncation();
        let mut out = Self::zero(chart);
        let mut word = Vec::with_capacity(n);
        for (m1, b1) in &self.terms {
            for (m2, b2) in &other.terms {
                if m1.len() + m2.len() > n {
                    continue;
                }
                word.clear();
                word.extend_from_slice(&m1.0);
                word.extend_from_slice(&m2.0);
                if let Some((sign, m)) = normalize(chart, &word)? {
                    let body = b1 * b2;
                    let body = if sign.is_minus() { -&body } else { body };
                    out.add_term(m, body);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Section {
        let mut out = Self::one(&self.chart);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Splits into homogeneous components by total degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<Degree, Section> {
        let mut parts: BTreeMap<Degree, Section> = BTreeMap::new();
        for (m, b) in &self.terms {
            let d = m.degree(&self.chart);
            parts
                .entry(d)
                .or_insert_with(|| Self::zero(&self.chart))
                .terms
                .insert(m.clone(), b.clone());
        }
        parts
    }

    pub fn homogeneous_part(&self, d: Degree) -> Section {
        Section {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree(&self.chart) == d)
                .map(|(m, b)| (m.clone(), b.clone()))
                .collect(),
        }
    }

    /// Degree of a nonzero homogeneous section; `None` for zero or mixed sections.
    pub fn homogeneous_degree(&self) -> Option<Degree> {
        let mut degrees = self.terms.keys().map(|m| m.degree(&self.chart));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// True for zero and for single-degree sections.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Terms whose word has exactly `len` letters.
    pub fn word_length_part(&self, len: usize) -> Section {
        Section {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.len() == len)
                .map(|(m, b)| (m.clone(), b.clone()))
                .collect(),
        }
    }

    /// The unique decomposition `(f_0, {word ↦ f_word})`; the map excludes the empty word.
    pub fn decompose(&self) -> (BodyPolynomial, BTreeMap<Monomial, BodyPolynomial>) {
        let f0 = self.body_projection();
        let rest = self
            .terms
            .iter()
            .filter(|(m, _)| !m.is_empty())
            .map(|(m, b)| (m.clone(), b.clone()))
            .collect();
        (f0, rest)
    }

    /// Inverse of [`Section::decompose`].
    pub fn from_components(
        chart: &Arc<Chart>,
        f0: BodyPolynomial,
        components: BTreeMap<Monomial, BodyPolynomial>,
    ) -> Result<Section> {
        let mut out = Self::zero(chart);
        for (m, b) in std::iter::once((Monomial::empty(), f0)).chain(components) {
            if b.nvars() != chart.smooth_dim() {
                return Err(Error::ArityMismatch {
                    expected: chart.smooth_dim(),
                    found: b.nvars(),
                });
            }
            let m = Monomial::from_normal_word(chart, m.0)?;
            out.add_term(m, b);
        }
        Ok(out)
    }

    /// The body `f_0` (the projection onto smooth functions).
    pub fn body_projection(&self) -> BodyPolynomial {
        self.component(&Monomial::empty())
    }

    /// The value `f(x) = f_0(x)`.
    pub fn value(&self, x: &Point) -> Result<Rational> {
        x.check(&self.chart)?;
        Ok(self.body_projection().eval(&x.0))
    }

    /// Lowest filtration order at `x`: the minimum over terms of
    /// (total degree in `t - x`) + (word length). `None` for zero.
    pub fn vanishing_order(&self, x: &Point) -> Result<Option<usize>> {
        x.check(&self.chart)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(m, b)| {
                b.translate(&x.0)
                    .lowest_degree()
                    .map(|d| d as usize + m.len())
            })
            .min())
    }

    /// Whether `f ∈ I_x^r`, where `I_x` is generated by `t_i - t_i(x)` and all `w_α`.
    pub fn in_null_value_ideal_power(&self, x: &Point, r: usize) -> Result<bool> {
        if r == 0 {
            return Err(Error::Precondition("ideal power must be at least 1".into()));
        }
        Ok(self.vanishing_order(x)?.is_none_or(|o| o >= r))
    }

    /// The polynomial `P_{k,x}` with `f - P_{k,x} ∈ I_x^{k+1}`: each body
    /// `f_{α_1…α_K}` Taylor-truncated at order `k - K` around `x`, words with
    /// `K > k` dropped.
    pub fn taylor_polynomial(&self, x: &Point, k: usize) -> Result<Section> {
        x.check(&self.chart)?;
        let mut out = Self::zero(&self.chart);
        for (m, b) in &self.terms {
            if m.len() > k {
                continue;
            }
            out.add_term(m.clone(), b.taylor(&x.0, (k - m.len()) as u32));
        }
        Ok(out)
    }

    /// Multiplicative inverse for sections whose body is a nonzero constant `a`:
    /// `a^{-1} Σ_k (-a^{-1} f̃)^k`, which terminates since `f̃` has no empty word.
    pub fn invert(&self) -> Result<Section> {
        let f0 = self.body_projection();
        let a = f0.as_constant().ok_or_else(|| {
            Error::NotInvertible("body is not constant; only constant bodies invert exactly".into())
        })?;
        if a.is_zero() {
            return Err(Error::NotInvertible("body vanishes".into()));
        }
        let a_inv = a.recip();
        let mut nilpotent = self.clone();
        nilpotent.terms.remove(&Monomial::empty());
        let step = nilpotent.scale(&-a_inv.clone());
        let mut out = Self::one(&self.chart);
        let mut power = Self::one(&self.chart);
        for _ in 0..self.chart.truncation() {
            power = &power * &step;
            if power.is_zero() {
                break;
            }
            out = &out + &power;
        }
        Ok(out.scale(&a_inv))
    }

    /// Pullback along a chart morphism given by coordinate images.
    pub fn substitute(&self, map: &ChartMorphism) -> Result<Section> {
        if !(Arc::ptr_eq(&self.chart, &map.source) || *self.chart == *map.source) {
            return Err(Error::ChartMismatch);
        }
        let target = &map.target;
        let ns = self.chart.smooth_dim();
        // cached powers of the smooth images
        let mut powers: Vec<Vec<Section>> = vec![vec![Section::one(target)]; ns];
        let mut out = Section::zero(target);
        for (m, b) in &self.terms {
            let mut body_image = Section::zero(target);
            for (e, c) in b.terms() {
                let mut term = Section::constant(target, c.clone());
                for (i, &k) in e.iter().enumerate() {
                    let k = k as usize;
                    while powers[i].len() <= k {
                        let next = &powers[i][powers[i].len() - 1] * &map.smooth[i];
                        powers[i].push(next);
                    }
                    if k > 0 {
                        term = &term * &powers[i][k];
                    }
                }
                body_image = &body_image + &term;
            }
            let mut image = body_image;
            for &a in &m.0 {
                if image.is_zero() {
                    break;
                }
                image = &image * &map.formal[a];
            }
            out = &out + &image;
        }
        Ok(out)
    }

    /// Renders with coordinate names, e.g. `3/4*t1^2*w1 + w2`.
    pub fn display(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, b)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if m.is_empty() {
                b.fmt_with(f, &self.chart.smooth)?;
                continue;
            }
            if b.as_constant() != Some(Rational::one()) {
                write!(f, "(")?;
                b.fmt_with(f, &self.chart.smooth)?;
                write!(f, ")*")?;
            }
            let names: Vec<&str> =
                m.0.iter()
                    .map(|&a| self.chart.formal[a].0.as_str())
                    .collect();
            write!(f, "{}", names.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &Section {
    type Output = Section;
    fn add(self, rhs: &Section) -> Section {
        assert!(self.same_chart(rhs), "chart mismatch");
        let mut out = self.clone();
        for (m, b) in &rhs.terms {
            out.add_term(m.clone(), b.clone());
        }
        out
    }
}

impl Sub for &Section {
    type Output = Section;
    fn sub(self, rhs: &Section) -> Section {
        assert!(self.same_chart(rhs), "chart mismatch");
        let mut out = self.clone();
        for (m, b) in &rhs.terms {
            out.add_term(m.clone(), -b);
        }
        out
    }
}

impl Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Section {
    type Output = Section;
    fn mul(self, rhs: &Section) -> Section {
        self.multiply(rhs).expect("chart mismatch")
    }
}

/// Coordinate images defining a pullback `O(target) ← O(source)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartMorphism {
    source: Arc<Chart>,
    target: Arc<Chart>,
    smooth: Vec<Section>,
    formal: Vec<Section>,
}

impl ChartMorphism {
    /// Images keyed by source coordinate. When source and target coincide,
    /// unlisted coordinates map to themselves; otherwise every coordinate
    /// needs an image.
    pub fn new(
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        images: BTreeMap<Coord, Section>,
    ) -> Result<ChartMorphism> {
        let same = Arc::ptr_eq(source, target) || source == target;
        let mut smooth = Vec::with_capacity(source.smooth_dim());
        let mut formal = Vec::with_capacity(source.formal_dim());
        for c in source.coords() {
            let name = source.coord_name(c);
            let image = match images.get(&c) {
                Some(img) => img.clone(),
                None if same => Section::coordinate(target, c),
                None => {
                    return Err(Error::Precondition(format!(
                        "no image given for coordinate `{name}`"
                    )))
                }
            };
            if !(Arc::ptr_eq(image.chart(), target) || **image.chart() == **target) {
                return Err(Error::ChartMismatch);
            }
            let want = source.coord_degree(c);
            if !image.is_zero() && image.homogeneous_degree() != Some(want) {
                return Err(Error::DegreeMismatch(format!(
                    "image of `{name}` must be homogeneous of degree {want}"
                )));
            }
            match c {
                Coord::Smooth(_) => smooth.push(image),
                Coord::Formal(_) => formal.push(image),
            }
        }
        for c in images.keys() {
            let ok = match *c {
                Coord::Smooth(i) => i < source.smooth_dim(),
                Coord::Formal(a) => a < source.formal_dim(),
            };
            if !ok {
                return Err(Error::Precondition(format!(
                    "coordinate {c:?} not on source chart"
                )));
            }
        }
        Ok(ChartMorphism {
            source: source.clone(),
            target: target.clone(),
            smooth,
            formal,
        })
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn image(&self, c: Coord) -> &Section {
        match c {
            Coord::Smooth(i) => &self.smooth[i],
            Coord::Formal(a) => &self.formal[a],
        }
    }

    /// `other ∘ self` as pullbacks: first substitute along `self`, then along `other`.
    pub fn then(&self, other: &ChartMorphism) -> Result<ChartMorphism> {
        let mut images = BTreeMap::new();
        for c in self.source.coords() {
            images.insert(c, self.image(c).substitute(other)?);
        }
        ChartMorphism::new(&self.source, &other.target, images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{rat, ratio};

    fn chart_tw() -> Arc<Chart> {
        Chart::build(&["t1"], &[("w1", 1), ("w2", 1)], 3).unwrap()
    }

    #[test]
    fn chart_invariants() {
        assert_eq!(
            Chart::build(&["t1"], &[("t1", 1)], 2).unwrap_err(),
            Error::DuplicateCoordinate("t1".into())
        );
        assert_eq!(
            Chart::build(&[], &[("w", 0)], 2).unwrap_err(),
            Error::ZeroDegreeFormal("w".into())
        );
        let c = Chart::build(&["t1", "t2"], &[("a", 1), ("b", -2), ("c", 1)], 2).unwrap();
        let dim = c.dimension();
        assert_eq!(dim.get(Degree(0)), 2);
        assert_eq!(dim.get(Degree(1)), 2);
        assert_eq!(dim.get(Degree(-2)), 1);
    }

    #[test]
    fn normalize_examples() {
        let c = chart_tw();
        let (s, m) = normalize(&c, &[1, 0]).unwrap().unwrap();
        assert_eq!(s, Sign::Minus);
        assert_eq!(m.indices(), &[0, 1]);
        assert!(normalize(&c, &[0, 0]).unwrap().is_none());
        assert!(matches!(
            normalize(&c, &[7]),
            Err(Error::UnknownIndex { index: 7, .. })
        ));
        let even = Chart::build(&[], &[("u", 2), ("v", -2)], 4).unwrap();
        let (s, m) = normalize(&even, &[1, 0]).unwrap().unwrap();
        assert_eq!(s, Sign::Plus);
        assert_eq!(m.indices(), &[0, 1]);
        // beyond truncation
        assert!(normalize(&even, &[0, 0, 0, 0, 0]).unwrap().is_none());
    }

    #[test]
    fn unit_and_difference_of_squares() {
        let c = Chart::build(&["t1"], &[("w", 2)], 2).unwrap();
        let f = &Section::var(&c, "t1") * &Section::var(&c, "w");
        assert_eq!(&Section::one(&c) * &f, f);
        let one = Section::one(&c);
        let w = Section::var(&c, "w");
        let lhs = &(&one - &w) * &(&one + &w);
        assert_eq!(lhs, &one - &(&w * &w));
        assert!(!(&w * &w).is_zero());
    }

    #[test]
    fn decompose_and_projection() {
        let c = chart_tw();
        let t1 = Section::var(&c, "t1");
        let w1 = Section::var(&c, "w1");
        let w2 = Section::var(&c, "w2");
        let f = &Section::constant(&c, rat(3)) + &(&t1 * &w1);
        let (f0, comps) = f.decompose();
        assert_eq!(f0, BodyPolynomial::constant(1, rat(3)));
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[&Monomial(vec![0])], BodyPolynomial::variable(1, 0));
        assert_eq!(Section::from_components(&c, f0, comps).unwrap(), f);

        assert!(w1.body_projection().is_zero());
        let g = &(&Section::constant(&c, rat(5)) + &(&t1 * &t1)) + &(&t1 * &(&w1 * &w2));
        assert_eq!(
            g.body_projection(),
            &BodyPolynomial::constant(1, rat(5)) + &BodyPolynomial::variable(1, 0).pow(2)
        );
        assert_eq!(g.value(&Point(vec![rat(2)])).unwrap(), rat(9));
        assert_eq!(w1.value(&Point(vec![rat(7)])).unwrap(), rat(0));
        assert!(matches!(
            g.value(&Point(vec![])),
            Err(Error::ArityMismatch {
                expected: 1,
                found: 0
            })
        ));
    }

    #[test]
    fn membership_examples() {
        let c = chart_tw();
        let w1 = Section::var(&c, "w1");
        let x = Point(vec![rat(4)]);
        assert!(w1.in_null_value_ideal_power(&x, 1).unwrap());
        assert!(!w1.in_null_value_ideal_power(&x, 2).unwrap());
        let t1 = Section::var(&c, "t1");
        let s = &t1 - &Section::one(&c);
        let sq = &s * &s;
        assert!(sq
            .in_null_value_ideal_power(&Point(vec![rat(1)]), 2)
            .unwrap());
        assert!(!sq
            .in_null_value_ideal_power(&Point(vec![rat(1)]), 3)
            .unwrap());
        assert!(!sq
            .in_null_value_ideal_power(&Point(vec![rat(0)]), 1)
            .unwrap());
        assert!(Section::zero(&c).in_null_value_ideal_power(&x, 9).unwrap());
    }

    #[test]
    fn taylor_examples() {
        let c = chart_tw();
        let t1 = Section::var(&c, "t1");
        let w1 = Section::var(&c, "w1");
        let origin = Point::origin(1);
        let sq = &t1 * &t1;
        let p = sq.taylor_polynomial(&origin, 1).unwrap();
        assert!(p.is_zero());
        assert!((&sq - &p).in_null_value_ideal_power(&origin, 2).unwrap());

        let f = &t1 + &(&t1 * &w1);
        let p = f.taylor_polynomial(&origin, 1).unwrap();
        assert_eq!(p, t1);
        assert!((&f - &p).in_null_value_ideal_power(&origin, 2).unwrap());
    }

    #[test]
    fn inversion_examples() {
        let c = Chart::build(&["t1"], &[("w", 2)], 3).unwrap();
        assert_eq!(
            Section::constant(&c, rat(2)).invert().unwrap(),
            Section::constant(&c, ratio(1, 2))
        );
        let one = Section::one(&c);
        let w = Section::var(&c, "w");
        let inv = (&one - &w).invert().unwrap();
        let expected = &(&(&one + &w) + &w.pow(2)) + &w.pow(3);
        assert_eq!(inv, expected);
        assert_eq!(&(&one - &w) * &inv, one);
        let t1 = Section::var(&c, "t1");
        assert!(matches!(
            (&one + &t1).invert(),
            Err(Error::NotInvertible(_))
        ));
        assert!(matches!(w.invert(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn substitution_examples() {
        let c = Chart::build(&["t1"], &[("w", 2)], 2).unwrap();
        let t1 = Section::var(&c, "t1");
        let w = Section::var(&c, "w");
        let f = &(&t1 * &t1) + &w;
        let id = ChartMorphism::new(&c, &c, BTreeMap::new()).unwrap();
        assert_eq!(f.substitute(&id).unwrap(), f);

        // t1 ↦ t1 + w is rejected: the image of a smooth coordinate must have degree 0
        let bad = ChartMorphism::new(&c, &c, BTreeMap::from([(Coord::Smooth(0), &t1 + &w)]));
        assert!(matches!(bad, Err(Error::DegreeMismatch(_))));

        // with a degree-0 nilpotent u·v the binomial expansion goes through
        let d = Chart::build(&["t1"], &[("u", 2), ("v", -2)], 4).unwrap();
        let t1 = Section::var(&d, "t1");
        let uv = &Section::var(&d, "u") * &Section::var(&d, "v");
        let shift =
            ChartMorphism::new(&d, &d, BTreeMap::from([(Coord::Smooth(0), &t1 + &uv)])).unwrap();
        let sq = &t1 * &t1;
        let expected = &(&sq + &(&t1 * &uv).scale(&rat(2))) + &(&uv * &uv);
        assert_eq!(sq.substitute(&shift).unwrap(), expected);
    }

    #[test]
    fn odd_generators_anticommute() {
        let c = chart_tw();
        let w1 = Section::var(&c, "w1");
        let w2 = Section::var(&c, "w2");
        assert_eq!(&w1 * &w2, -&(&w2 * &w1));
        assert!((&w1 * &w1).is_zero());
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = chart_tw();
        let b = Chart::build(&["s"], &[], 2).unwrap();
        assert_eq!(
            Section::one(&a).multiply(&Section::one(&b)).unwrap_err(),
            Error::ChartMismatch
        );
    }
}
