//! Batch front end: JSON documents in, canonical JSON reports out.
//!
//! Document grammar (all rationals are strings `"p"` or `"p/q"`; JSON
//! integers are also accepted on input):
//!
//! ```text
//! {
//!   "chart":  {"smooth": ["t1", ...], "formal": [["w1", 1], ...], "truncation": N},
//!   "sections": [ SECTION, ... ],
//!   "vector_fields": [ {"<coordinate>": SECTION, ...}, ... ],
//!   "lie_algebra": {"dim": n, "c": [[k, i, j, "p/q"], ...]},
//!   "algebroid": {"n": n, "m": m, "rho": [[i, a, BODY], ...], "C": [[c, a, b, BODY], ...]}
//! }
//! SECTION = [[COEF, {"<smooth>": exponent, ...}, ["<formal>", ...]], ...]
//! BODY    = COEF | [[COEF, {"<smooth>": exponent, ...}], ...]
//! ```
//!
//! Indices in `lie_algebra` and `algebroid` are 0-based. Formal words may be
//! written in any order; they are normal-ordered with Koszul signs. Unlisted
//! structure constants are zero, so both `c[k][i][j]` and `c[k][j][i]` must
//! be given. Algebroid bodies are polynomials in `x1..xn`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::body::{BodyPolynomial, Exponents, Rational};
use crate::calculus::VectorField;
use crate::error::Error;
use crate::graded_linear::Degree;
use crate::q_structures::{
    algebroid_q, chevalley_eilenberg, derived_bracket, extract_linfinity, homotopy_jacobi_residual,
    is_homological, AlgebroidChartData, HomologicalCheck, LInfinityBrackets, LieAlgebraData,
};
use crate::symmetric_algebra::{normalize, Chart, Coord, Point, Section};

/// A rejected input, with a stable code and the JSON path where it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub code: &'static str,
    pub path: String,
    pub message: String,
}

impl InputError {
    fn new(code: &'static str, path: impl Into<String>, message: impl Into<String>) -> Self {
        InputError {
            code,
            path: path.into(),
            message: message.into(),
        }
    }

    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new("E_SCHEMA", path, message)
    }

    fn from_domain(path: impl Into<String>, e: Error) -> Self {
        Self::new(e.code(), path, e.to_string())
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

impl std::error::Error for InputError {}

type ParseResult<T> = Result<T, InputError>;

/// Validated contents of an input document.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub chart: Option<Arc<Chart>>,
    pub sections: Vec<Section>,
    pub vector_fields: Vec<VectorField>,
    pub lie_algebra: Option<LieAlgebraData>,
    pub algebroid: Option<AlgebroidChartData>,
}

const TOP_LEVEL_KEYS: [&str; 5] = [
    "chart",
    "sections",
    "vector_fields",
    "lie_algebra",
    "algebroid",
];

/// Parses a document, using the chart's own truncation.
pub fn parse_document(text: &str) -> ParseResult<Document> {
    parse_document_with(text, None)
}

/// Parses a document; `truncation` overrides the chart's truncation.
pub fn parse_document_with(text: &str, truncation: Option<usize>) -> ParseResult<Document> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| InputError::new("E_JSON", "$", format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| InputError::schema("$", "document must be a JSON object"))?;
    for key in obj.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            return Err(InputError::schema(
                format!("$.{key}"),
                format!("unknown top-level key `{key}`"),
            ));
        }
    }
    let mut doc = Document::default();
    if let Some(v) = obj.get("chart") {
        doc.chart = Some(parse_chart(v, "$.chart", truncation)?);
    }
    if let Some(v) = obj.get("sections") {
        let chart = require_chart(&doc, "$.sections")?;
        let arr = as_array(v, "$.sections")?;
        for (i, s) in arr.iter().enumerate() {
            doc.sections
                .push(parse_section(&chart, s, &format!("$.sections[{i}]"))?);
        }
    }
    if let Some(v) = obj.get("vector_fields") {
        let chart = require_chart(&doc, "$.vector_fields")?;
        let arr = as_array(v, "$.vector_fields")?;
        for (i, f) in arr.iter().enumerate() {
            doc.vector_fields.push(parse_vector_field(
                &chart,
                f,
                &format!("$.vector_fields[{i}]"),
            )?);
        }
    }
    if let Some(v) = obj.get("lie_algebra") {
        doc.lie_algebra = Some(parse_lie_algebra(v, "$.lie_algebra")?);
    }
    if let Some(v) = obj.get("algebroid") {
        doc.algebroid = Some(parse_algebroid(v, "$.algebroid")?);
    }
    Ok(doc)
}

fn require_chart(doc: &Document, path: &str) -> ParseResult<Arc<Chart>> {
    doc.chart
        .clone()
        .ok_or_else(|| InputError::schema(path, "a `chart` is required to interpret this entry"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> ParseResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| InputError::schema(path, "expected an array"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> ParseResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| InputError::schema(path, "expected an object"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> ParseResult<&'a str> {
    v.as_str()
        .ok_or_else(|| InputError::schema(path, "expected a string"))
}

fn as_usize(v: &Value, path: &str) -> ParseResult<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| InputError::schema(path, "expected a nonnegative integer"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> ParseResult<&'a Value> {
    obj.get(key)
        .ok_or_else(|| InputError::schema(format!("{path}.{key}"), format!("missing `{key}`")))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> ParseResult<()> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(InputError::schema(
                format!("{path}.{k}"),
                format!("unexpected key `{k}`"),
            ));
        }
    }
    Ok(())
}

/// Parses `"p"`, `"p/q"` or a JSON integer.
pub fn parse_rational_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

fn parse_rational(v: &Value, path: &str) -> ParseResult<Rational> {
    let parsed = match v {
        Value::String(s) => parse_rational_str(s),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(i.into()))
            .or_else(|| n.as_u64().map(|u| Rational::from_integer(u.into()))),
        _ => None,
    };
    parsed.ok_or_else(|| {
        InputError::new(
            "E_BAD_RATIONAL",
            path,
            format!("expected a rational \"p/q\", found {v}"),
        )
    })
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

fn rational_json(r: &Rational) -> Value {
    Value::String(rational_to_string(r))
}

/// Decimal rendering rounded half away from zero to `digits` places.
pub fn rational_to_decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled: BigInt = r.numer() * &scale * 2 + r.denom() * r.numer().signum();
    let (q, _) = scaled.div_rem(&(r.denom() * 2));
    let neg = q.is_negative();
    let digits_str = q.abs().to_string();
    let padded = format!("{:0>width$}", digits_str, width = digits + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn parse_chart(v: &Value, path: &str, truncation: Option<usize>) -> ParseResult<Arc<Chart>> {
    let obj = as_object(v, path)?;
    check_keys(obj, &["smooth", "formal", "truncation"], path)?;
    let smooth = match obj.get("smooth") {
        None => Vec::new(),
        Some(s) => as_array(s, &format!("{path}.smooth"))?
            .iter()
            .enumerate()
            .map(|(i, n)| as_str(n, &format!("{path}.smooth[{i}]")).map(str::to_string))
            .collect::<ParseResult<Vec<_>>>()?,
    };
    let mut formal = Vec::new();
    if let Some(f) = obj.get("formal") {
        for (i, entry) in as_array(f, &format!("{path}.formal"))?.iter().enumerate() {
            let p = format!("{path}.formal[{i}]");
            let pair = as_array(entry, &p)?;
            if pair.len() != 2 {
                return Err(InputError::schema(p, "expected [name, degree]"));
            }
            let name = as_str(&pair[0], &format!("{p}[0]"))?.to_string();
            let deg = pair[1]
                .as_i64()
                .and_then(|d| i32::try_from(d).ok())
                .ok_or_else(|| {
                    InputError::schema(format!("{p}[1]"), "expected an integer degree")
                })?;
            formal.push((name, Degree(deg)));
        }
    }
    let n = match truncation {
        Some(n) => n,
        None => as_usize(
            field(obj, "truncation", path)?,
            &format!("{path}.truncation"),
        )?,
    };
    Chart::new(smooth, formal, n).map_err(|e| InputError::from_domain(path, e))
}

fn parse_exponents(
    names: &[String],
    v: &Value,
    path: &str,
    chart: Option<&Chart>,
) -> ParseResult<Exponents> {
    let obj = as_object(v, path)?;
    let mut e = vec![0u32; names.len()];
    for (name, k) in obj {
        let p = format!("{path}.{name}");
        let Some(i) = names.iter().position(|n| n == name) else {
            if chart.and_then(|c| c.coord(name)).is_some() {
                return Err(InputError::new(
                    "E_DEGREE_MISMATCH",
                    p,
                    format!(
                        "`{name}` is a formal coordinate; list it in the word, not the exponents"
                    ),
                ));
            }
            return Err(InputError::new(
                "E_UNKNOWN_COORD",
                p,
                format!("unknown coordinate `{name}`"),
            ));
        };
        let k = k
            .as_u64()
            .and_then(|k| u32::try_from(k).ok())
            .ok_or_else(|| InputError::schema(p, "expected a nonnegative integer exponent"))?;
        e[i] += k;
    }
    Ok(e)
}

/// Parses a section term list against a chart.
pub fn parse_section(chart: &Arc<Chart>, v: &Value, path: &str) -> ParseResult<Section> {
    let mut out = Section::zero(chart);
    for (t, term) in as_array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{t}]");
        let parts = as_array(term, &p)?;
        if parts.is_empty() || parts.len() > 3 {
            return Err(InputError::schema(
                p,
                "expected [coefficient, {exponents}, [word]]",
            ));
        }
        let coef = parse_rational(&parts[0], &format!("{p}[0]"))?;
        let exps = match parts.get(1) {
            Some(e) => parse_exponents(chart.smooth_names(), e, &format!("{p}[1]"), Some(chart))?,
            None => vec![0; chart.smooth_dim()],
        };
        let mut word = Vec::new();
        if let Some(w) = parts.get(2) {
            for (i, letter) in as_array(w, &format!("{p}[2]"))?.iter().enumerate() {
                let lp = format!("{p}[2][{i}]");
                let name = as_str(letter, &lp)?;
                match chart.coord(name) {
                    Some(Coord::Formal(a)) => word.push(a),
                    Some(Coord::Smooth(_)) => {
                        return Err(InputError::new(
                            "E_DEGREE_MISMATCH",
                            lp,
                            format!("`{name}` has degree 0; put it in the exponents, not the word"),
                        ))
                    }
                    None => {
                        return Err(InputError::new(
                            "E_UNKNOWN_COORD",
                            lp,
                            format!("unknown coordinate `{name}`"),
                        ))
                    }
                }
            }
        }
        let body = BodyPolynomial::monomial(exps, coef);
        if let Some((sign, m)) =
            normalize(chart, &word).map_err(|e| InputError::from_domain(&p, e))?
        {
            let body = if sign.is_minus() { -&body } else { body };
            out = &out + &Section::from_term(chart, m, body);
        }
    }
    Ok(out)
}

fn parse_vector_field(chart: &Arc<Chart>, v: &Value, path: &str) -> ParseResult<VectorField> {
    let obj = as_object(v, path)?;
    let mut images = BTreeMap::new();
    for (name, s) in obj {
        let p = format!("{path}.{name}");
        let c = chart.coord(name).ok_or_else(|| {
            InputError::new(
                "E_UNKNOWN_COORD",
                &p,
                format!("unknown coordinate `{name}`"),
            )
        })?;
        images.insert(c, parse_section(chart, s, &p)?);
    }
    VectorField::from_images(chart, images).map_err(|e| InputError::from_domain(path, e))
}

fn parse_lie_algebra(v: &Value, path: &str) -> ParseResult<LieAlgebraData> {
    let obj = as_object(v, path)?;
    check_keys(obj, &["dim", "c"], path)?;
    let dim = as_usize(field(obj, "dim", path)?, &format!("{path}.dim"))?;
    let mut entries = Vec::new();
    if let Some(c) = obj.get("c") {
        for (i, e) in as_array(c, &format!("{path}.c"))?.iter().enumerate() {
            let p = format!("{path}.c[{i}]");
            let parts = as_array(e, &p)?;
            if parts.len() != 4 {
                return Err(InputError::schema(p, "expected [k, i, j, \"p/q\"]"));
            }
            let idx = |n: usize| -> ParseResult<usize> {
                let k = as_usize(&parts[n], &format!("{p}[{n}]"))?;
                if k >= dim {
                    return Err(InputError::new(
                        "E_ARITY",
                        format!("{p}[{n}]"),
                        format!("index {k} out of range for dimension {dim}"),
                    ));
                }
                Ok(k)
            };
            entries.push((
                idx(0)?,
                idx(1)?,
                idx(2)?,
                parse_rational(&parts[3], &format!("{p}[3]"))?,
            ));
        }
    }
    LieAlgebraData::from_entries(dim, entries).map_err(|e| InputError::from_domain(path, e))
}

fn parse_body(names: &[String], v: &Value, path: &str) -> ParseResult<BodyPolynomial> {
    if !v.is_array() {
        let c = parse_rational(v, path)?;
        return Ok(BodyPolynomial::constant(names.len(), c));
    }
    let mut out = BodyPolynomial::zero(names.len());
    for (t, term) in as_array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{t}]");
        let parts = as_array(term, &p)?;
        if parts.is_empty() || parts.len() > 2 {
            return Err(InputError::schema(p, "expected [coefficient, {exponents}]"));
        }
        let c = parse_rational(&parts[0], &format!("{p}[0]"))?;
        let e = match parts.get(1) {
            Some(e) => parse_exponents(names, e, &format!("{p}[1]"), None)?,
            None => vec![0; names.len()],
        };
        out = &out + &BodyPolynomial::monomial(e, c);
    }
    Ok(out)
}

fn base_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn parse_algebroid(v: &Value, path: &str) -> ParseResult<AlgebroidChartData> {
    let obj = as_object(v, path)?;
    check_keys(obj, &["n", "m", "rho", "C"], path)?;
    let n = as_usize(field(obj, "n", path)?, &format!("{path}.n"))?;
    let m = as_usize(field(obj, "m", path)?, &format!("{path}.m"))?;
    let names = base_names(n);
    let zero = BodyPolynomial::zero(n);
    let mut anchor = vec![vec![zero.clone(); m]; n];
    let mut structure = vec![vec![vec![zero; m]; m]; m];
    let in_range = |k: usize, bound: usize, p: String| -> ParseResult<usize> {
        if k < bound {
            Ok(k)
        } else {
            Err(InputError::new(
                "E_ARITY",
                p,
                format!("index {k} out of range (< {bound})"),
            ))
        }
    };
    if let Some(r) = obj.get("rho") {
        for (t, e) in as_array(r, &format!("{path}.rho"))?.iter().enumerate() {
            let p = format!("{path}.rho[{t}]");
            let parts = as_array(e, &p)?;
            if parts.len() != 3 {
                return Err(InputError::schema(p, "expected [i, a, BODY]"));
            }
            let i = in_range(
                as_usize(&parts[0], &format!("{p}[0]"))?,
                n,
                format!("{p}[0]"),
            )?;
            let a = in_range(
                as_usize(&parts[1], &format!("{p}[1]"))?,
                m,
                format!("{p}[1]"),
            )?;
            anchor[i][a] = parse_body(&names, &parts[2], &format!("{p}[2]"))?;
        }
    }
    if let Some(c) = obj.get("C") {
        for (t, e) in as_array(c, &format!("{path}.C"))?.iter().enumerate() {
            let p = format!("{path}.C[{t}]");
            let parts = as_array(e, &p)?;
            if parts.len() != 4 {
                return Err(InputError::schema(p, "expected [c, a, b, BODY]"));
            }
            let c = in_range(
                as_usize(&parts[0], &format!("{p}[0]"))?,
                m,
                format!("{p}[0]"),
            )?;
            let a = in_range(
                as_usize(&parts[1], &format!("{p}[1]"))?,
                m,
                format!("{p}[1]"),
            )?;
            let b = in_range(
                as_usize(&parts[2], &format!("{p}[2]"))?,
                m,
                format!("{p}[2]"),
            )?;
            structure[c][a][b] = parse_body(&names, &parts[3], &format!("{p}[3]"))?;
        }
    }
    AlgebroidChartData::new(n, m, anchor, structure).map_err(|e| InputError::from_domain(path, e))
}

// ---------------------------------------------------------------------------
// canonical serialization

pub fn chart_to_json(chart: &Chart) -> Value {
    json!({
        "smooth": chart.smooth_names(),
        "formal": chart
            .formal_coords()
            .iter()
            .map(|(n, d)| json!([n, d.0]))
            .collect::<Vec<_>>(),
        "truncation": chart.truncation(),
    })
}

fn exponents_json(names: &[String], e: &[u32]) -> Value {
    let mut m = Map::new();
    for (name, &k) in names.iter().zip(e) {
        if k > 0 {
            m.insert(name.clone(), json!(k));
        }
    }
    Value::Object(m)
}

/// Terms in normal-form order: by word, then by exponent vector.
pub fn section_to_json(s: &Section) -> Value {
    let chart = s.chart();
    let mut out = Vec::new();
    for (word, body) in s.terms() {
        let letters: Vec<&str> = word
            .indices()
            .iter()
            .map(|&a| chart.formal_coords()[a].0.as_str())
            .collect();
        for (e, c) in body.terms() {
            out.push(json!([
                rational_json(c),
                exponents_json(chart.smooth_names(), e),
                letters
            ]));
        }
    }
    Value::Array(out)
}

pub fn body_to_json(names: &[String], p: &BodyPolynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(e, c)| json!([rational_json(c), exponents_json(names, e)]))
            .collect(),
    )
}

/// Nonzero images only, keyed by coordinate name.
pub fn vector_field_to_json(x: &VectorField) -> Value {
    let mut m = Map::new();
    for (c, s) in x.images() {
        if !s.is_zero() {
            m.insert(x.chart().coord_name(c).to_string(), section_to_json(s));
        }
    }
    Value::Object(m)
}

pub fn lie_algebra_to_json(g: &LieAlgebraData) -> Value {
    json!({
        "dim": g.dim(),
        "c": g
            .entries()
            .map(|(k, i, j, v)| json!([k, i, j, rational_json(v)]))
            .collect::<Vec<_>>(),
    })
}

pub fn algebroid_to_json(a: &AlgebroidChartData) -> Value {
    let names = base_names(a.base_dim());
    let mut rho = Vec::new();
    for i in 0..a.base_dim() {
        for k in 0..a.rank() {
            let p = a.anchor(i, k);
            if !p.is_zero() {
                rho.push(json!([i, k, body_to_json(&names, p)]));
            }
        }
    }
    let mut cs = Vec::new();
    for c in 0..a.rank() {
        for x in 0..a.rank() {
            for y in 0..a.rank() {
                let p = a.structure(c, x, y);
                if !p.is_zero() {
                    cs.push(json!([c, x, y, body_to_json(&names, p)]));
                }
            }
        }
    }
    json!({"n": a.base_dim(), "m": a.rank(), "rho": rho, "C": cs})
}

pub fn linfinity_to_json(l: &LInfinityBrackets) -> Value {
    let chart = l.chart();
    let name = |a: usize| chart.formal_coords()[a].0.clone();
    let mut m = Map::new();
    for n in l.support() {
        let entries: Vec<Value> = l
            .arity(n)
            .map(|((target, args), v)| {
                json!([
                    name(*target),
                    args.iter().map(|&a| name(a)).collect::<Vec<_>>(),
                    rational_json(v)
                ])
            })
            .collect();
        m.insert(n.to_string(), Value::Array(entries));
    }
    Value::Object(m)
}

/// Canonical document form; `parse_document` inverts it.
pub fn document_to_json(doc: &Document) -> Value {
    let mut m = Map::new();
    if let Some(c) = &doc.chart {
        m.insert("chart".into(), chart_to_json(c));
    }
    if !doc.sections.is_empty() {
        m.insert(
            "sections".into(),
            Value::Array(doc.sections.iter().map(section_to_json).collect()),
        );
    }
    if !doc.vector_fields.is_empty() {
        m.insert(
            "vector_fields".into(),
            Value::Array(doc.vector_fields.iter().map(vector_field_to_json).collect()),
        );
    }
    if let Some(g) = &doc.lie_algebra {
        m.insert("lie_algebra".into(), lie_algebra_to_json(g));
    }
    if let Some(a) = &doc.algebroid {
        m.insert("algebroid".into(), algebroid_to_json(a));
    }
    Value::Object(m)
}

fn residual_json(chart: &Chart, residual: &BTreeMap<Coord, Section>) -> Value {
    let mut m = Map::new();
    for (c, s) in residual {
        m.insert(chart.coord_name(*c).to_string(), section_to_json(s));
    }
    Value::Object(m)
}

// ---------------------------------------------------------------------------
// jobs and reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    CheckQ,
    Ce,
    DerivedBracket,
    Linfinity,
    Algebroid,
    Commutator,
    Apply,
    Eval,
    Taylor,
    Invert,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::CheckQ,
        Command::Ce,
        Command::DerivedBracket,
        Command::Linfinity,
        Command::Algebroid,
        Command::Commutator,
        Command::Apply,
        Command::Eval,
        Command::Taylor,
        Command::Invert,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::CheckQ => "check-q",
            Command::Ce => "ce",
            Command::DerivedBracket => "derived-bracket",
            Command::Linfinity => "linfinity",
            Command::Algebroid => "algebroid",
            Command::Commutator => "commutator",
            Command::Apply => "apply",
            Command::Eval => "eval",
            Command::Taylor => "taylor",
            Command::Invert => "invert",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JobOptions {
    pub truncation: Option<usize>,
    pub point: Option<String>,
    pub order: Option<usize>,
    pub max_arity: Option<usize>,
    /// Decimal digits for display-only approximations; computation stays exact.
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobDescription {
    pub command: Command,
    pub input: String,
    pub options: JobOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    InputError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::InputError => "input-error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::InputError => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub result: Value,
    pub witness: Option<Value>,
    pub error: Option<InputError>,
    pub timing_us: u64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn input_error(command: &str, e: InputError) -> Report {
        Report {
            command: command.to_string(),
            status: Status::InputError,
            result: Value::Null,
            witness: None,
            error: Some(e),
            timing_us: 0,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("status".into(), json!(self.status.as_str()));
        m.insert("exit_code".into(), json!(self.exit_code()));
        if !self.result.is_null() {
            m.insert("result".into(), self.result.clone());
        }
        if let Some(w) = &self.witness {
            m.insert("witness".into(), w.clone());
        }
        if let Some(e) = &self.error {
            m.insert(
                "error".into(),
                json!({"code": e.code, "path": e.path, "message": e.message}),
            );
        }
        m.insert("timing_us".into(), json!(self.timing_us));
        Value::Object(m)
    }

    /// Pretty-printed with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }
}

struct Outcome {
    status: Status,
    result: Value,
    witness: Option<Value>,
}

impl Outcome {
    fn pass(result: Value) -> Self {
        Outcome {
            status: Status::Pass,
            result,
            witness: None,
        }
    }
}

/// Executes a job. Never panics on bad input; input problems become
/// `input-error` reports.
pub fn run(job: &JobDescription) -> Report {
    let start = Instant::now();
    let name = job.command.as_str();
    let outcome =
        parse_document_with(&job.input, job.options.truncation).and_then(|doc| dispatch(job, &doc));
    let timing_us = start.elapsed().as_micros() as u64;
    match outcome {
        Ok(o) => Report {
            command: name.to_string(),
            status: o.status,
            result: o.result,
            witness: o.witness,
            error: None,
            timing_us,
        },
        Err(e) => Report {
            timing_us,
            ..Report::input_error(name, e)
        },
    }
}

fn usage(message: impl Into<String>) -> InputError {
    InputError::new("E_USAGE", "$", message)
}

fn domain(path: &str) -> impl Fn(Error) -> InputError + '_ {
    move |e| InputError::from_domain(path, e)
}

fn parse_point(chart: &Chart, opts: &JobOptions) -> ParseResult<Point> {
    let raw = opts
        .point
        .as_deref()
        .ok_or_else(|| usage("this command needs --point"))?;
    let coords = if raw.trim().is_empty() {
        Vec::new()
    } else {
        raw.split(',')
            .map(|t| {
                parse_rational_str(t).ok_or_else(|| {
                    InputError::new("E_BAD_RATIONAL", "--point", format!("bad coordinate `{t}`"))
                })
            })
            .collect::<ParseResult<Vec<_>>>()?
    };
    if coords.len() != chart.smooth_dim() {
        return Err(InputError::from_domain(
            "--point",
            Error::ArityMismatch {
                expected: chart.smooth_dim(),
                found: coords.len(),
            },
        ));
    }
    Ok(Point(coords))
}

fn first_field(doc: &Document, n: usize) -> ParseResult<&[VectorField]> {
    if doc.vector_fields.len() < n {
        return Err(usage(format!("this command needs {n} vector field(s)")));
    }
    Ok(&doc.vector_fields[..n])
}

fn first_section(doc: &Document) -> ParseResult<&Section> {
    doc.sections
        .first()
        .ok_or_else(|| usage("this command needs a section"))
}

fn homological_outcome(
    mut result: Map<String, Value>,
    q: &VectorField,
    check: &HomologicalCheck,
) -> Outcome {
    let ok = check.is_homological();
    result.insert("homological".into(), json!(ok));
    result.insert(
        "degrees".into(),
        json!(q.degree_parts().keys().map(|d| d.0).collect::<Vec<_>>()),
    );
    let witness = (!ok).then(|| {
        json!({
            "off_degree_parts": check.off_degree_parts.iter().map(|d| d.0).collect::<Vec<_>>(),
            "residual": residual_json(q.chart(), &check.residual),
        })
    });
    Outcome {
        status: if ok { Status::Pass } else { Status::Fail },
        result: Value::Object(result),
        witness,
    }
}

fn field_result(chart: &Chart, q: &VectorField) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("chart".into(), chart_to_json(chart));
    m.insert("vector_field".into(), vector_field_to_json(q));
    m
}

fn dispatch(job: &JobDescription, doc: &Document) -> ParseResult<Outcome> {
    let opts = &job.options;
    match job.command {
        Command::CheckQ => {
            let (chart, q) = if let Some(q) = doc.vector_fields.first() {
                (q.chart().clone(), q.clone())
            } else if let Some(g) = &doc.lie_algebra {
                chevalley_eilenberg(g).map_err(domain("$.lie_algebra"))?
            } else if let Some(a) = &doc.algebroid {
                algebroid_q(a, opts.truncation.unwrap_or(3)).map_err(domain("$.algebroid"))?
            } else {
                return Err(usage(
                    "check-q needs a vector field, a lie_algebra or an algebroid",
                ));
            };
            let check = is_homological(&q);
            Ok(homological_outcome(field_result(&chart, &q), &q, &check))
        }
        Command::Ce => {
            let g = doc
                .lie_algebra
                .as_ref()
                .ok_or_else(|| usage("ce needs a lie_algebra"))?;
            let (chart, q) = chevalley_eilenberg(g).map_err(domain("$.lie_algebra"))?;
            let check = is_homological(&q);
            Ok(homological_outcome(field_result(&chart, &q), &q, &check))
        }
        Command::DerivedBracket => {
            let q = &first_field(doc, 1)?[0];
            let g = derived_bracket(q).map_err(domain("$.vector_fields[0]"))?;
            let mut m = Map::new();
            m.insert("lie_algebra".into(), lie_algebra_to_json(&g));
            let check = is_homological(q);
            Ok(homological_outcome(m, q, &check))
        }
        Command::Linfinity => {
            let q = &first_field(doc, 1)?[0];
            let n = opts.max_arity.unwrap_or(q.chart().truncation());
            let l = extract_linfinity(q, n).map_err(domain("$.vector_fields[0]"))?;
            let mut m = Map::new();
            m.insert("brackets".into(), linfinity_to_json(&l));
            let mut by_arity = Map::new();
            for k in 0..=q.chart().truncation() {
                let r = homotopy_jacobi_residual(q, k).map_err(domain("$.vector_fields[0]"))?;
                if !r.is_empty() {
                    by_arity.insert(k.to_string(), residual_json(q.chart(), &r));
                }
            }
            let ok = by_arity.is_empty();
            m.insert("homological".into(), json!(ok));
            Ok(Outcome {
                status: if ok { Status::Pass } else { Status::Fail },
                result: Value::Object(m),
                witness: (!ok).then(|| json!({"residual_by_word_length": by_arity})),
            })
        }
        Command::Algebroid => {
            let a = doc
                .algebroid
                .as_ref()
                .ok_or_else(|| usage("algebroid needs algebroid data"))?;
            let n = opts.truncation.unwrap_or(3);
            let (chart, q) = algebroid_q(a, n).map_err(domain("$.algebroid"))?;
            let check = is_homological(&q);
            Ok(homological_outcome(field_result(&chart, &q), &q, &check))
        }
        Command::Commutator => {
            let fields = first_field(doc, 2)?;
            let c = fields[0]
                .commutator(&fields[1])
                .map_err(domain("$.vector_fields"))?;
            let mut m = Map::new();
            m.insert("vector_field".into(), vector_field_to_json(&c));
            m.insert(
                "degrees".into(),
                json!(c.degree_parts().keys().map(|d| d.0).collect::<Vec<_>>()),
            );
            Ok(Outcome::pass(Value::Object(m)))
        }
        Command::Apply => {
            let x = &first_field(doc, 1)?[0];
            let f = first_section(doc)?;
            let y = x.apply(f).map_err(domain("$"))?;
            Ok(Outcome::pass(json!({"section": section_to_json(&y)})))
        }
        Command::Eval => {
            let chart = doc
                .chart
                .as_ref()
                .ok_or_else(|| usage("eval needs a chart"))?;
            if doc.sections.is_empty() {
                return Err(usage("eval needs at least one section"));
            }
            let x = parse_point(chart, opts)?;
            let values = doc
                .sections
                .iter()
                .map(|s| s.value(&x))
                .collect::<Result<Vec<_>, _>>()
                .map_err(domain("--point"))?;
            let mut m = Map::new();
            m.insert(
                "values".into(),
                Value::Array(values.iter().map(rational_json).collect()),
            );
            if let Some(p) = opts.precision {
                m.insert(
                    "display".into(),
                    Value::Array(
                        values
                            .iter()
                            .map(|v| Value::String(rational_to_decimal(v, p)))
                            .collect(),
                    ),
                );
            }
            Ok(Outcome::pass(Value::Object(m)))
        }
        Command::Taylor => {
            let f = first_section(doc)?;
            let x = parse_point(f.chart(), opts)?;
            let k = opts.order.ok_or_else(|| usage("taylor needs --order"))?;
            let p = f.taylor_polynomial(&x, k).map_err(domain("--point"))?;
            let residual = f - &p;
            let certified = residual
                .in_null_value_ideal_power(&x, k + 1)
                .map_err(domain("--point"))?;
            let mut m = Map::new();
            m.insert("taylor".into(), section_to_json(&p));
            m.insert("ideal_power".into(), json!(k + 1));
            m.insert("residual_in_ideal_power".into(), json!(certified));
            Ok(Outcome {
                status: if certified {
                    Status::Pass
                } else {
                    Status::Fail
                },
                result: Value::Object(m),
                witness: (!certified).then(|| json!({"residual": section_to_json(&residual)})),
            })
        }
        Command::Invert => {
            let f = first_section(doc)?;
            let inv = f.invert().map_err(domain("$.sections[0]"))?;
            let product = f * &inv;
            let ok = product == Section::one(f.chart());
            let mut m = Map::new();
            m.insert("inverse".into(), section_to_json(&inv));
            m.insert("product_is_one".into(), json!(ok));
            Ok(Outcome {
                status: if ok { Status::Pass } else { Status::Fail },
                result: Value::Object(m),
                witness: (!ok).then(|| json!({"product": section_to_json(&product)})),
            })
        }
    }
}
