//! Parameter documents, seeded parameter generation, route dispatch and the
//! named cross-check suites with their reports.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bethe::{
    b_recursion_residual, bethe_recursion_residual, dwpf_bethe, dwpf_product_general, dwpf_twisted,
    matrix_equation_residual, partition_identity_residual, product_form_sides, twist_conjugate, twisted_closed_forms,
};
use crate::enumeration::{count_configurations, dwpf_brute, dwpf_transfer, two_enumeration};
use crate::error::{Error, Result};
use crate::izergin::{
    cauchy_factorization_residual, degree_residual, dwpf_homogeneous, dwpf_restricted_det, dwpf_restricted_product,
    korepin_recursion_residual, row_expansion_residual, second_recursion, symmetry_residual, toda_residual,
    RestrictedParams,
};
use crate::model::{field_root, line_weights, Line, ModelParams};
use crate::numeric::{is_finite, max_pairwise_rel, Scalar};

const ONE: Scalar = Scalar::new(1.0, 0.0);

/// A complex number in a parameter document: a bare real or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_scalar(self) -> Scalar {
        match self {
            ComplexValue::Real(x) => Scalar::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Scalar::new(re, im),
        }
    }
}

impl From<Scalar> for ComplexValue {
    fn from(z: Scalar) -> Self {
        ComplexValue::Pair([z.re, z.im])
    }
}

/// The on-disk form of [`ModelParams`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDocument {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<ComplexValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<ComplexValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<ComplexValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<ComplexValue>>,
}

impl ParamsDocument {
    pub fn from_params(p: &ModelParams) -> Self {
        let conv = |xs: &[Scalar]| Some(xs.iter().map(|&z| z.into()).collect());
        Self {
            n: p.n(),
            alpha: conv(p.alpha()),
            beta: conv(p.beta()),
            u: conv(p.u()),
            v: conv(p.v()),
        }
    }

    pub fn to_params(&self, strict: bool) -> Result<ModelParams> {
        let fields = [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("u", &self.u),
            ("v", &self.v),
        ];
        for (name, field) in fields {
            if let Some(xs) = field {
                if xs.len() != self.n {
                    return Err(Error::Schema(format!(
                        "field `{name}` has length {} but n = {}",
                        xs.len(),
                        self.n
                    )));
                }
            }
        }
        let mut columns = Vec::with_capacity(4);
        for (name, field) in fields {
            let xs = field
                .as_ref()
                .ok_or_else(|| Error::Schema(format!("missing field `{name}`")))?;
            columns.push(xs.iter().map(|c| c.to_scalar()).collect::<Vec<_>>());
        }
        if self.n == 0 {
            return Err(Error::Schema("n must be at least 1".into()));
        }
        let v = columns.pop().unwrap();
        let u = columns.pop().unwrap();
        let beta = columns.pop().unwrap();
        let alpha = columns.pop().unwrap();
        ModelParams::with_regularity(alpha, beta, u, v, strict)
    }
}

/// Parses a JSON parameter document. With `strict`, fields equal to `±1`
/// are rejected.
pub fn parse_params(document: &str, strict: bool) -> Result<ModelParams> {
    let doc: ParamsDocument = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    doc.to_params(strict)
}

pub fn params_to_json(p: &ModelParams) -> String {
    serde_json::to_string(&ParamsDocument::from_params(p)).expect("parameter documents always serialise")
}

/// Minimum distances enforced on generated parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRule {
    /// Least distance between fields of one family and from the loci
    /// `α = β`, `αβ = 1`, `|α| = 1`, `|β| = 1`.
    pub min_distance: f64,
    /// Also keep every weight that some route divides by at least
    /// `min_distance` away from zero.
    pub dressed: bool,
}

impl Default for SeparationRule {
    fn default() -> Self {
        Self {
            min_distance: 0.1,
            dressed: true,
        }
    }
}

impl SeparationRule {
    fn far(&self, x: Scalar) -> bool {
        x.norm() >= self.min_distance
    }

    fn field_ok(&self, z: Scalar) -> bool {
        (1.0 - z.norm()).abs() >= self.min_distance
    }

    fn cross_ok(&self, a: Scalar, b: Scalar) -> bool {
        self.far(a - b) && self.far(ONE - a * b)
    }

    fn dressed_same(&self, x: &Line, y: &Line) -> bool {
        let (xy, yx) = (line_weights(x, y), line_weights(y, x));
        self.far(xy.a2) && self.far(yx.a2) && self.far(xy.b2) && self.far(yx.b2)
    }

    fn dressed_cross(&self, h: &Line, w: &Line) -> bool {
        let (hw, wh) = (line_weights(h, w), line_weights(w, h));
        self.far(hw.a2) && self.far(hw.b2) && self.far(wh.b2)
    }

    /// Checks a restricted parameter set, naming the first offending pair.
    pub fn check_restricted(&self, p: &RestrictedParams) -> Result<()> {
        self.check_fields(p.alpha(), p.beta())
    }

    fn check_fields(&self, alpha: &[Scalar], beta: &[Scalar]) -> Result<()> {
        let n = alpha.len();
        for (name, xs) in [("alpha", alpha), ("beta", beta)] {
            for i in 0..n {
                if !self.field_ok(xs[i]) {
                    return Err(Error::Domain(format!(
                        "{name}[{i}] is within {} of the unit circle",
                        self.min_distance
                    )));
                }
                for j in i + 1..n {
                    if !self.far(xs[i] - xs[j]) {
                        return Err(Error::Domain(format!(
                            "{name}[{i}] and {name}[{j}] are closer than {}",
                            self.min_distance
                        )));
                    }
                }
            }
        }
        for (i, &a) in alpha.iter().enumerate() {
            for (j, &b) in beta.iter().enumerate() {
                if !self.cross_ok(a, b) {
                    return Err(Error::Domain(format!(
                        "alpha[{i}], beta[{j}] lie within {} of a kernel pole",
                        self.min_distance
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks a full parameter set, naming the first offending pair.
    pub fn check(&self, p: &ModelParams) -> Result<()> {
        self.check_fields(p.alpha(), p.beta())?;
        if !self.dressed {
            return Ok(());
        }
        let n = p.n();
        for i in 0..n {
            for j in i + 1..n {
                if !self.dressed_same(&p.horizontal(i), &p.horizontal(j)) {
                    return Err(Error::Domain(format!(
                        "horizontal lines {i} and {j} have a small weight"
                    )));
                }
                if !self.dressed_same(&p.vertical(i), &p.vertical(j)) {
                    return Err(Error::Domain(format!("vertical lines {i} and {j} have a small weight")));
                }
            }
            for j in 0..n {
                if !self.dressed_cross(&p.horizontal(i), &p.vertical(j)) {
                    return Err(Error::Domain(format!("node ({i}, {j}) has a small weight")));
                }
            }
        }
        Ok(())
    }
}

/// Rejections allowed before the generator gives up.
pub const MAX_REJECTIONS: usize = 10_000;

const FIELD_RADIUS: f64 = 0.7;

fn draw_disk(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let z = Scalar::new(
            rng.gen_range(-FIELD_RADIUS..FIELD_RADIUS),
            rng.gen_range(-FIELD_RADIUS..FIELD_RADIUS),
        );
        if z.norm() < FIELD_RADIUS {
            return z;
        }
    }
}

fn draw_rapidity(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::new(rng.gen_range(-0.5..=0.5), rng.gen_range(-0.3..=0.3))
}

struct Rejections(usize);

impl Rejections {
    fn draw<T>(&mut self, mut make: impl FnMut() -> T, accept: impl Fn(&T) -> bool) -> Result<T> {
        loop {
            let x = make();
            if accept(&x) {
                return Ok(x);
            }
            self.0 += 1;
            if self.0 >= MAX_REJECTIONS {
                return Err(Error::GeneratorStuck { attempts: self.0 });
            }
        }
    }
}

/// Deterministic random parameters: fields uniform on the disk `|z| < 0.7`,
/// rapidities with real part in `[−0.5, 0.5]` and imaginary part in
/// `[−0.3, 0.3]`. Lines are drawn one at a time and redrawn until they
/// satisfy `rule` against every earlier line.
pub fn generate_params(seed: u64, n: usize, rule: &SeparationRule) -> Result<ModelParams> {
    if n == 0 {
        return Err(Error::Schema("lattice size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rej = Rejections(0);
    let mut hs: Vec<Line> = Vec::with_capacity(n);
    let mut ws: Vec<Line> = Vec::with_capacity(n);
    for _ in 0..n {
        let h = rej.draw(
            || Line::new(draw_disk(&mut rng), draw_rapidity(&mut rng)),
            |h| {
                rule.field_ok(h.field)
                    && hs
                        .iter()
                        .all(|x| rule.far(x.field - h.field) && (!rule.dressed || rule.dressed_same(x, h)))
                    && ws
                        .iter()
                        .all(|w| rule.cross_ok(h.field, w.field) && (!rule.dressed || rule.dressed_cross(h, w)))
            },
        )?;
        hs.push(h);
        let w = rej.draw(
            || Line::new(draw_disk(&mut rng), draw_rapidity(&mut rng)),
            |w| {
                rule.field_ok(w.field)
                    && ws
                        .iter()
                        .all(|x| rule.far(x.field - w.field) && (!rule.dressed || rule.dressed_same(x, w)))
                    && hs
                        .iter()
                        .all(|h| rule.cross_ok(h.field, w.field) && (!rule.dressed || rule.dressed_cross(h, w)))
            },
        )?;
        ws.push(w);
    }
    ModelParams::new(
        hs.iter().map(|l| l.field).collect(),
        ws.iter().map(|l| l.field).collect(),
        hs.iter().map(|l| l.rapidity).collect(),
        ws.iter().map(|l| l.rapidity).collect(),
    )
}

/// As [`generate_params`] with every rapidity zero; only the field rules apply.
pub fn generate_restricted(seed: u64, n: usize, rule: &SeparationRule) -> Result<RestrictedParams> {
    if n == 0 {
        return Err(Error::Schema("lattice size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rej = Rejections(0);
    let (mut alpha, mut beta): (Vec<Scalar>, Vec<Scalar>) = (Vec::new(), Vec::new());
    for _ in 0..n {
        let a = rej.draw(
            || draw_disk(&mut rng),
            |a| {
                rule.field_ok(*a) && alpha.iter().all(|x| rule.far(x - a)) && beta.iter().all(|b| rule.cross_ok(*a, *b))
            },
        )?;
        alpha.push(a);
        let b = rej.draw(
            || draw_disk(&mut rng),
            |b| {
                rule.field_ok(*b) && beta.iter().all(|x| rule.far(x - b)) && alpha.iter().all(|a| rule.cross_ok(*a, *b))
            },
        )?;
        beta.push(b);
    }
    RestrictedParams::new(alpha, beta)
}

/// Routes that evaluate the partition function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    Transfer,
    Det,
    ProductRestricted,
    Bethe,
    Twisted,
    ProductGeneral,
    Homogeneous,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Brute,
        Method::Transfer,
        Method::Det,
        Method::ProductRestricted,
        Method::Bethe,
        Method::Twisted,
        Method::ProductGeneral,
        Method::Homogeneous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Transfer => "transfer",
            Method::Det => "det",
            Method::ProductRestricted => "product-restricted",
            Method::Bethe => "bethe",
            Method::Twisted => "twisted",
            Method::ProductGeneral => "product-general",
            Method::Homogeneous => "homogeneous",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
            Error::Usage(format!("unknown method `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

fn homogeneous_point(p: &ModelParams) -> Result<(Scalar, Scalar)> {
    if !p.is_restricted() {
        return Err(Error::Domain(
            "homogeneous route needs every rapidity to be zero".into(),
        ));
    }
    let (a, b) = (p.alpha()[0], p.beta()[0]);
    if p.alpha().iter().any(|&x| x != a) || p.beta().iter().any(|&x| x != b) {
        return Err(Error::Domain(
            "homogeneous route needs all alpha equal and all beta equal".into(),
        ));
    }
    Ok((a, b))
}

/// Evaluates the partition function by the chosen route.
pub fn compute(method: Method, p: &ModelParams) -> Result<Scalar> {
    match method {
        Method::Brute => dwpf_brute(p),
        Method::Transfer => dwpf_transfer(p),
        Method::Det => dwpf_restricted_det(&RestrictedParams::from_model(p)?),
        Method::ProductRestricted => Ok(dwpf_restricted_product(&RestrictedParams::from_model(p)?)),
        Method::Bethe => dwpf_bethe(p),
        Method::Twisted => dwpf_twisted(p),
        Method::ProductGeneral => Ok(dwpf_product_general(p)),
        Method::Homogeneous => {
            let (a, b) = homogeneous_point(p)?;
            dwpf_homogeneous(a, b, p.n())
        }
    }
}

/// Pass thresholds for every suite check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub routes: f64,
    pub restricted: f64,
    pub restricted_large: f64,
    pub korepin: f64,
    pub second_recursion: f64,
    pub row_expansion: f64,
    pub symmetry: f64,
    pub degree: f64,
    pub cauchy: f64,
    pub homogeneous: f64,
    pub toda: f64,
    pub twist: f64,
    pub operator_recursion: f64,
    pub bethe_recursion: f64,
    pub partition: f64,
    pub product_form: f64,
    pub two_enumeration: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            routes: 1e-10,
            restricted: 1e-10,
            restricted_large: 1e-8,
            korepin: 1e-9,
            second_recursion: 1e-6,
            row_expansion: 1e-9,
            symmetry: 1e-11,
            degree: 1e-8,
            cauchy: 1e-8,
            homogeneous: 1e-8,
            toda: 1e-8,
            twist: 1e-10,
            operator_recursion: 1e-10,
            bethe_recursion: 1e-9,
            partition: 1e-9,
            product_form: 1e-10,
            two_enumeration: 1e-10,
        }
    }
}

impl Tolerances {
    /// Overrides one tolerance by its field name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::Usage(format!("tolerance `{key}` must be non-negative")));
        }
        let slot = match key {
            "routes" => &mut self.routes,
            "restricted" => &mut self.restricted,
            "restricted_large" => &mut self.restricted_large,
            "korepin" => &mut self.korepin,
            "second_recursion" => &mut self.second_recursion,
            "row_expansion" => &mut self.row_expansion,
            "symmetry" => &mut self.symmetry,
            "degree" => &mut self.degree,
            "cauchy" => &mut self.cauchy,
            "homogeneous" => &mut self.homogeneous,
            "toda" => &mut self.toda,
            "twist" => &mut self.twist,
            "operator_recursion" => &mut self.operator_recursion,
            "bethe_recursion" => &mut self.bethe_recursion,
            "partition" => &mut self.partition,
            "product_form" => &mut self.product_form,
            "two_enumeration" => &mut self.two_enumeration,
            _ => return Err(Error::Usage(format!("unknown tolerance `{key}`"))),
        };
        *slot = value;
        Ok(())
    }
}

/// Suite execution settings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteConfig {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub tolerances: Tolerances,
    pub rule: SeparationRule,
}

/// One executed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub check: String,
    pub seed: u64,
    pub n: usize,
    /// The exact inputs, enough to replay the case.
    pub inputs: Value,
    pub method: String,
    pub value: Option<[f64; 2]>,
    pub comparators: BTreeMap<String, [f64; 2]>,
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub elapsed_ms: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseRecord {
    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.values().copied().reduce(f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub failures: usize,
    pub max_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: impl Into<String>, mut cases: Vec<CaseRecord>) -> Self {
        cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let summary = Summary {
            cases: cases.len(),
            failures: cases.iter().filter(|c| !c.pass).count(),
            max_residual: cases.iter().filter_map(|c| c.max_residual()).reduce(f64::max),
        };
        Self {
            suite: suite.into(),
            cases,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// The same report with wall-clock timings zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.cases {
            c.elapsed_ms = 0.0;
        }
        r
    }

    /// One JSON object per case, then a final `{"suite", "summary"}` line.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.cases {
            serde_json::to_writer(&mut w, c).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
        }
        serde_json::to_writer(&mut w, &json!({"suite": self.suite, "summary": self.summary}))
            .map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn to_json_lines(&self) -> String {
        let mut buf = Vec::new();
        self.write_json_lines(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Flat table: `case_id, method, re, im, residual, ms`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["case_id", "method", "re", "im", "residual", "ms"])
            .map_err(csv_err)?;
        for c in &self.cases {
            let [re, im] = c
                .value
                .map_or([String::new(), String::new()], |[a, b]| [a.to_string(), b.to_string()]);
            let residual = c.max_residual().map_or(String::new(), |r| r.to_string());
            out.write_record([
                c.case_id.clone(),
                c.method.clone(),
                re,
                im,
                residual,
                c.elapsed_ms.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Named check sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    RoutesAgree,
    Korepin,
    BetheIdentities,
    Toda,
    Counting,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::RoutesAgree,
        Suite::Korepin,
        Suite::BetheIdentities,
        Suite::Toda,
        Suite::Counting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::RoutesAgree => "routes-agree",
            Suite::Korepin => "korepin",
            Suite::BetheIdentities => "bethe-identities",
            Suite::Toda => "toda",
            Suite::Counting => "counting",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|m| m.name()).collect();
            Error::Usage(format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Routes,
    Restricted,
    Korepin,
    SecondRecursion,
    RowExpansion,
    Symmetry,
    Degree,
    Cauchy,
    Homogeneous,
    Toda,
    Twist,
    BRecursion,
    MatrixEquation,
    BetheRecursion,
    Partition,
    ProductForm,
    Count,
    TwoEnumeration,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Routes => "routes",
            Check::Restricted => "restricted",
            Check::Korepin => "korepin",
            Check::SecondRecursion => "second-recursion",
            Check::RowExpansion => "row-expansion",
            Check::Symmetry => "symmetry",
            Check::Degree => "degree",
            Check::Cauchy => "cauchy",
            Check::Homogeneous => "homogeneous",
            Check::Toda => "toda",
            Check::Twist => "twist",
            Check::BRecursion => "b-recursion",
            Check::MatrixEquation => "matrix-equation",
            Check::BetheRecursion => "bethe-recursion",
            Check::Partition => "partition-identity",
            Check::ProductForm => "product-form",
            Check::Count => "count",
            Check::TwoEnumeration => "two-enumeration",
        }
    }

    fn tolerance(self, n: usize, t: &Tolerances) -> f64 {
        match self {
            Check::Routes => t.routes,
            Check::Restricted if n >= 7 => t.restricted_large,
            Check::Restricted => t.restricted,
            Check::Korepin => t.korepin,
            Check::SecondRecursion => t.second_recursion,
            Check::RowExpansion => t.row_expansion,
            Check::Symmetry => t.symmetry,
            Check::Degree => t.degree,
            Check::Cauchy => t.cauchy,
            Check::Homogeneous => t.homogeneous,
            Check::Toda => t.toda,
            Check::Twist => t.twist,
            Check::BRecursion | Check::MatrixEquation => t.operator_recursion,
            Check::BetheRecursion => t.bethe_recursion,
            Check::Partition => t.partition,
            Check::ProductForm => t.product_form,
            Check::Count => 0.0,
            Check::TwoEnumeration => t.two_enumeration,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Case {
    check: Check,
    seed: u64,
    n: usize,
}

impl Case {
    fn id(&self, suite: Suite) -> String {
        format!(
            "{}/{}/n{:02}/s{:06}",
            suite.name(),
            self.check.name(),
            self.n,
            self.seed
        )
    }
}

fn cases_for(suite: Suite, seeds: &[u64]) -> Vec<Case> {
    let mut out = Vec::new();
    let mut add = |check: Check, sizes: std::ops::RangeInclusive<usize>| {
        for &seed in seeds {
            for n in sizes.clone() {
                out.push(Case { check, seed, n });
            }
        }
    };
    match suite {
        Suite::RoutesAgree => {
            add(Check::Routes, 1..=4);
            add(Check::Restricted, 1..=8);
        }
        Suite::Korepin => {
            add(Check::Korepin, 1..=4);
            add(Check::SecondRecursion, 1..=3);
            add(Check::RowExpansion, 1..=4);
            add(Check::Symmetry, 2..=4);
            add(Check::Degree, 2..=4);
            add(Check::Cauchy, 1..=6);
        }
        Suite::BetheIdentities => {
            add(Check::Twist, 2..=3);
            add(Check::BRecursion, 2..=3);
            add(Check::MatrixEquation, 2..=3);
            add(Check::BetheRecursion, 2..=4);
            add(Check::Partition, 1..=8);
            add(Check::ProductForm, 1..=5);
        }
        Suite::Toda => {
            add(Check::Homogeneous, 1..=5);
            add(Check::Toda, 2..=3);
        }
        Suite::Counting => {
            // Seed-independent: one case per size.
            for n in 1..=5 {
                out.push(Case {
                    check: Check::Count,
                    seed: 0,
                    n,
                });
            }
            for n in 1..=4 {
                out.push(Case {
                    check: Check::TwoEnumeration,
                    seed: 0,
                    n,
                });
            }
        }
    }
    out
}

/// Outcome of one check before timing and pass/fail are attached.
struct Outcome {
    inputs: Value,
    method: String,
    value: Option<Scalar>,
    comparators: BTreeMap<String, Scalar>,
    residuals: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(inputs: Value, method: impl Into<String>) -> Self {
        Self {
            inputs,
            method: method.into(),
            value: None,
            comparators: BTreeMap::new(),
            residuals: BTreeMap::new(),
        }
    }

    fn residual(mut self, name: impl Into<String>, r: f64) -> Self {
        self.residuals.insert(name.into(), r);
        self
    }
}

fn pair(z: Scalar) -> [f64; 2] {
    [z.re, z.im]
}

fn restricted_json(p: &RestrictedParams) -> Value {
    let conv = |xs: &[Scalar]| xs.iter().map(|z| pair(*z)).collect::<Vec<_>>();
    json!({"n": p.n(), "alpha": conv(p.alpha()), "beta": conv(p.beta())})
}

fn model_json(p: &ModelParams) -> Value {
    serde_json::to_value(ParamsDocument::from_params(p)).expect("parameter documents always serialise")
}

/// Salts that keep auxiliary random draws independent of the parameter draw.
const AUX_SALT: u64 = 0x5EED_A0C5;

fn aux_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ AUX_SALT ^ ((n as u64) << 40))
}

fn route_values(p: &ModelParams, methods: &[Method]) -> Result<BTreeMap<String, Scalar>> {
    methods
        .iter()
        .map(|&m| Ok((m.name().to_string(), compute(m, p)?)))
        .collect()
}

fn run_check(case: &Case, rule: &SeparationRule) -> Result<Outcome> {
    let Case { check, seed, n } = *case;
    match check {
        Check::Routes => {
            let p = generate_params(seed, n, rule)?;
            let mut methods = vec![Method::Brute, Method::Transfer, Method::Bethe];
            if n >= 2 {
                methods.push(Method::Twisted);
            }
            methods.push(Method::ProductGeneral);
            let values = route_values(&p, &methods)?;
            let all: Vec<Scalar> = values.values().copied().collect();
            let mut o = Outcome::new(model_json(&p), "brute").residual("pairwise", max_pairwise_rel(&all));
            o.value = values.get("brute").copied();
            o.comparators = values;
            Ok(o)
        }
        Check::Restricted => {
            let r = generate_restricted(seed, n, rule)?;
            let p = r.to_model();
            let mut methods = vec![Method::Det, Method::ProductRestricted];
            if n <= 4 {
                methods.extend([Method::Brute, Method::Transfer]);
            }
            let values = route_values(&p, &methods)?;
            let all: Vec<Scalar> = values.values().copied().collect();
            let mut o = Outcome::new(restricted_json(&r), "det").residual("pairwise", max_pairwise_rel(&all));
            o.value = values.get("det").copied();
            o.comparators = values;
            Ok(o)
        }
        Check::Korepin => {
            let r = generate_restricted(seed, n, rule)?;
            let mut o = Outcome::new(restricted_json(&r), "det");
            for m in 0..n {
                for k in 0..n {
                    o = o.residual(format!("m{m}n{k}"), korepin_recursion_residual(&r, m, k)?);
                }
            }
            Ok(o)
        }
        Check::SecondRecursion => {
            let r = generate_restricted(seed, n, rule)?;
            let s = second_recursion(&r)?;
            let mut o = Outcome::new(restricted_json(&r), "det")
                .residual("recursion", s.residual())
                .residual(
                    "product-limit",
                    crate::numeric::rel_diff(s.extrapolated, s.product_limit),
                );
            o.value = Some(s.extrapolated);
            o.comparators.insert("rhs".into(), s.rhs);
            o.comparators.insert("product-restricted".into(), s.product_limit);
            Ok(o)
        }
        Check::RowExpansion => {
            let r = generate_restricted(seed, n, rule)?;
            Ok(Outcome::new(restricted_json(&r), "det").residual("row-expansion", row_expansion_residual(&r)?))
        }
        Check::Symmetry => {
            let r = generate_restricted(seed, n, rule)?;
            let mut rng = aux_rng(seed, n);
            let mut pa: Vec<usize> = (0..n).collect();
            let mut pb: Vec<usize> = (0..n).collect();
            pa.shuffle(&mut rng);
            pb.shuffle(&mut rng);
            let identity: Vec<usize> = (0..n).collect();
            let mut inputs = restricted_json(&r);
            inputs["perm_alpha"] = json!(pa);
            inputs["perm_beta"] = json!(pb);
            Ok(Outcome::new(inputs, "det")
                .residual("alpha", symmetry_residual(&r, &pa, &identity)?)
                .residual("beta", symmetry_residual(&r, &identity, &pb)?))
        }
        Check::Degree => {
            let r = generate_restricted(seed, n, rule)?;
            let mut rng = aux_rng(seed, n);
            let mut rej = Rejections(0);
            let mut points: Vec<Scalar> = Vec::with_capacity(n + 5);
            let others: Vec<Scalar> = r.alpha()[1..].to_vec();
            while points.len() < n + 5 {
                let z = rej.draw(
                    || draw_disk(&mut rng),
                    |z| {
                        points.iter().chain(&others).all(|x| rule.far(x - z))
                            && r.beta().iter().all(|b| rule.cross_ok(*z, *b))
                    },
                )?;
                points.push(z);
            }
            let (nodes, tests) = points.split_at(n);
            let mut inputs = restricted_json(&r);
            inputs["nodes"] = json!(nodes.iter().map(|z| pair(*z)).collect::<Vec<_>>());
            inputs["tests"] = json!(tests.iter().map(|z| pair(*z)).collect::<Vec<_>>());
            Ok(Outcome::new(inputs, "det").residual("interpolation", degree_residual(&r, nodes, tests)?))
        }
        Check::Cauchy => {
            let r = generate_restricted(seed, n, rule)?;
            Ok(Outcome::new(restricted_json(&r), "det").residual("cauchy", cauchy_factorization_residual(&r)?))
        }
        Check::Homogeneous => {
            let r = generate_restricted(seed, 1, rule)?;
            let (a, b) = (r.alpha()[0], r.beta()[0]);
            let z = dwpf_homogeneous(a, b, n)?;
            let closed = (field_root(a) * field_root(b)).powu((n * n) as u32);
            let mut o = Outcome::new(json!({"n": n, "alpha": pair(a), "beta": pair(b)}), "homogeneous")
                .residual("closed-form", crate::numeric::rel_diff(z, closed));
            o.value = Some(z);
            o.comparators.insert("closed-form".into(), closed);
            Ok(o)
        }
        Check::Toda => {
            let r = generate_restricted(seed, 1, rule)?;
            let (a, b) = (r.alpha()[0], r.beta()[0]);
            Ok(Outcome::new(json!({"n": n, "alpha": pair(a), "beta": pair(b)}), "toda")
                .residual("toda", toda_residual(a, b, n)?))
        }
        Check::Twist => {
            let p = generate_params(seed, n, rule)?;
            let (a, u) = (p.alpha()[0], p.u()[0]);
            let direct = twist_conjugate(&p, a, u)?;
            let closed = twisted_closed_forms(&p, a, u)?.to_dense()?;
            let mut o = Outcome::new(model_json(&p), "twisted");
            for (name, (x, y)) in ["A", "B", "C", "D"]
                .into_iter()
                .zip(direct.blocks().into_iter().zip(closed.blocks()))
            {
                o = o.residual(name, x.rel_diff(y));
            }
            Ok(o)
        }
        Check::BRecursion => {
            let p = generate_params(seed, n, rule)?;
            Ok(Outcome::new(model_json(&p), "bethe")
                .residual("b-recursion", b_recursion_residual(&p, p.alpha()[0], p.u()[0])?))
        }
        Check::MatrixEquation => {
            let p = generate_params(seed, n, rule)?;
            Ok(Outcome::new(model_json(&p), "twisted")
                .residual("matrix-equation", matrix_equation_residual(&p, p.alpha()[0], p.u()[0])?))
        }
        Check::BetheRecursion => {
            let p = generate_params(seed, n, rule)?;
            Ok(Outcome::new(model_json(&p), "bethe").residual("recursion", bethe_recursion_residual(&p)?))
        }
        Check::Partition => {
            let p = generate_params(seed, n, rule)?;
            Ok(Outcome::new(model_json(&p), "product-general").residual("partition", partition_identity_residual(&p)?))
        }
        Check::ProductForm => {
            let p = generate_params(seed, n, rule)?;
            let mut rng = aux_rng(seed, n);
            let last = n - 1;
            let points: Vec<Scalar> = (0..2 * n).map(|_| draw_disk(&mut rng)).collect();
            let mut inputs = model_json(&p);
            inputs["alpha_last"] = json!(points.iter().map(|z| pair(*z)).collect::<Vec<_>>());
            let mut o = Outcome::new(inputs, "product-general");
            for (k, z) in points.iter().enumerate() {
                let q = p.with_horizontal(last, *z, p.u()[last]);
                o = o.residual(format!("point{k}"), product_form_sides(&q).residual());
            }
            Ok(o)
        }
        Check::Count => {
            const SNAPSHOT: [u64; 5] = [1, 2, 7, 42, 429];
            let c = count_configurations(n)?;
            let expected = SNAPSHOT[n - 1];
            let mut o = Outcome::new(json!({"n": n}), "count").residual("snapshot", (c as f64 - expected as f64).abs());
            o.value = Some(Scalar::new(c as f64, 0.0));
            o.comparators
                .insert("snapshot".into(), Scalar::new(expected as f64, 0.0));
            Ok(o)
        }
        Check::TwoEnumeration => {
            let t = two_enumeration(n)?;
            let w = Scalar::new(t.weighted_count, 0.0);
            let mut o = Outcome::new(json!({"n": n, "kappa": t.kappa}), "transfer").residual(
                "modulus",
                crate::numeric::rel_diff(Scalar::new(t.normalized.norm(), 0.0), w),
            );
            o.value = Some(t.normalized);
            o.comparators.insert("weighted-count".into(), w);
            Ok(o)
        }
    }
}

fn run_case(suite: Suite, case: &Case, config: &SuiteConfig) -> CaseRecord {
    let start = Instant::now();
    let result = run_check(case, &config.rule);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let tolerance = case.check.tolerance(case.n, &config.tolerances);
    let mut record = CaseRecord {
        case_id: case.id(suite),
        check: case.check.name().to_string(),
        seed: case.seed,
        n: case.n,
        inputs: Value::Null,
        method: String::new(),
        value: None,
        comparators: BTreeMap::new(),
        residuals: BTreeMap::new(),
        tolerance,
        elapsed_ms,
        pass: false,
        error: None,
    };
    match result {
        Ok(o) => {
            let finite = o.residuals.values().all(|r| r.is_finite())
                && o.value.is_none_or(is_finite)
                && o.comparators.values().all(|z| is_finite(*z));
            record.pass = finite && o.residuals.values().all(|&r| r <= tolerance);
            record.inputs = o.inputs;
            record.method = o.method;
            record.value = o.value.map(pair);
            record.comparators = o.comparators.into_iter().map(|(k, z)| (k, pair(z))).collect();
            record.residuals = o.residuals.into_iter().filter(|(_, r)| r.is_finite()).collect();
        }
        Err(e) => {
            record.inputs = json!({"seed": case.seed, "n": case.n, "rule": config.rule});
            record.error = Some(e.to_string());
        }
    }
    record
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Usage("thread count must be at least 1".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs a named suite over the given seeds. Records are sorted by case id,
/// so the report does not depend on the worker count.
pub fn run_suite(name: &str, seeds: &[u64], config: &SuiteConfig) -> Result<Report> {
    let suite: Suite = name.parse()?;
    let cases = cases_for(suite, seeds);
    let records = in_pool(config.threads, || {
        cases.par_iter().map(|c| run_case(suite, c, config)).collect()
    })?;
    Ok(Report::new(suite.name(), records))
}

/// Parses `a..b` (inclusive of both ends) or a single seed.
pub fn parse_seed_range(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Usage(format!("seed range `{s}` is not of the form a..b"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b): (u64, u64) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

/// One line of a sweep specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub method: Method,
    /// Explicit parameters; otherwise `seed` and `n` drive the generator.
    #[serde(default)]
    pub params: Option<ParamsDocument>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Zero all rapidities of generated parameters.
    #[serde(default)]
    pub restricted: bool,
    /// Further routes to compare against.
    #[serde(default)]
    pub compare: Vec<Method>,
}

fn sweep_params(entry: &SweepEntry, rule: &SeparationRule) -> Result<ModelParams> {
    match (&entry.params, entry.seed, entry.n) {
        (Some(doc), None, None) => doc.to_params(false),
        (None, Some(seed), Some(n)) if entry.restricted => Ok(generate_restricted(seed, n, rule)?.to_model()),
        (None, Some(seed), Some(n)) => generate_params(seed, n, rule),
        _ => Err(Error::Schema(
            "sweep entry needs either `params` or both `seed` and `n`".into(),
        )),
    }
}

fn sweep_case(index: usize, entry: &SweepEntry, config: &SuiteConfig) -> CaseRecord {
    let start = Instant::now();
    let outcome = sweep_params(entry, &config.rule).and_then(|p| {
        let value = compute(entry.method, &p)?;
        let mut comparators = BTreeMap::new();
        for &m in &entry.compare {
            comparators.insert(m.name().to_string(), compute(m, &p)?);
        }
        Ok((p, value, comparators))
    });
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut record = CaseRecord {
        case_id: format!("sweep/{index:06}"),
        check: "sweep".into(),
        seed: entry.seed.unwrap_or(0),
        n: entry.n.or(entry.params.as_ref().map(|d| d.n)).unwrap_or(0),
        inputs: serde_json::to_value(entry).expect("sweep entries always serialise"),
        method: entry.method.name().into(),
        value: None,
        comparators: BTreeMap::new(),
        residuals: BTreeMap::new(),
        tolerance: config.tolerances.routes,
        elapsed_ms,
        pass: false,
        error: None,
    };
    match outcome {
        Ok((p, value, comparators)) => {
            record.inputs["params"] = model_json(&p);
            record.value = Some(pair(value));
            if !comparators.is_empty() {
                let mut all = vec![value];
                all.extend(comparators.values().copied());
                let r = max_pairwise_rel(&all);
                if r.is_finite() {
                    record.residuals.insert("pairwise".into(), r);
                }
                record.pass = r <= record.tolerance;
            } else {
                record.pass = is_finite(value);
            }
            record.comparators = comparators.into_iter().map(|(k, z)| (k, pair(z))).collect();
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Evaluates a line-oriented sweep specification (one JSON object per
/// non-empty line; lines starting with `#` are skipped).
pub fn run_sweep(spec: &str, config: &SuiteConfig) -> Result<Report> {
    let entries: Vec<SweepEntry> = spec
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| Error::Schema(format!("line {}: {e}", k + 1))))
        .collect::<Result<_>>()?;
    let records = in_pool(config.threads, || {
        entries
            .par_iter()
            .enumerate()
            .map(|(k, e)| sweep_case(k, e, config))
            .collect()
    })?;
    Ok(Report::new("sweep", records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::re;

    #[test]
    fn parse_minimal_document() {
        let p = parse_params(r#"{"n":1,"alpha":[[0.3,0]],"beta":[[-0.4,0]],"u":[0],"v":[0]}"#, true).unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.alpha()[0], re(0.3));
        assert_eq!(p.beta()[0], re(-0.4));
        assert!(p.is_restricted());
    }

    #[test]
    fn parse_reports_length_mismatch() {
        let err = parse_params(r#"{"n":2,"alpha":[0.3]}"#, false).unwrap_err();
        assert!(matches!(&err, Error::Schema(m) if m.contains("alpha") && m.contains("length 1")));
        let err = parse_params(r#"{"n":1,"alpha":[0.3],"beta":[0.1],"u":[0]}"#, false).unwrap_err();
        assert!(matches!(&err, Error::Schema(m) if m.contains("`v`")));
        assert!(matches!(parse_params("{", false), Err(Error::Schema(_))));
        assert!(matches!(
            parse_params(r#"{"n":1,"alpha":[0],"beta":[0],"u":[0],"v":[0],"w":1}"#, false),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn strict_rejects_unit_field() {
        let doc = r#"{"n":2,"alpha":[[1,0],0.2],"beta":[0.1,0.3],"u":[0,0],"v":[0,0]}"#;
        assert!(matches!(parse_params(doc, true), Err(Error::Domain(m)) if m.contains("alpha[0]")));
        assert!(parse_params(doc, false).is_ok());
    }

    #[test]
    fn documents_round_trip_exactly() {
        let p = generate_params(7, 4, &SeparationRule::default()).unwrap();
        let back = parse_params(&params_to_json(&p), false).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn generator_is_deterministic() {
        let rule = SeparationRule::default();
        assert_eq!(
            generate_params(42, 3, &rule).unwrap(),
            generate_params(42, 3, &rule).unwrap()
        );
        assert_ne!(
            generate_params(42, 3, &rule).unwrap(),
            generate_params(43, 3, &rule).unwrap()
        );
        assert_eq!(
            generate_restricted(9, 5, &rule).unwrap(),
            generate_restricted(9, 5, &rule).unwrap()
        );
    }

    #[test]
    fn generated_draws_pass_the_validator() {
        let rule = SeparationRule::default();
        for seed in 0..30 {
            for n in [1, 3, 8] {
                let p = generate_params(seed, n, &rule).unwrap();
                rule.check(&p).unwrap();
                assert!(p.alpha().iter().chain(p.beta()).all(|z| z.norm() < 0.7));
                assert!(p
                    .u()
                    .iter()
                    .chain(p.v())
                    .all(|z| z.re.abs() <= 0.5 && z.im.abs() <= 0.3));
                rule.check_restricted(&generate_restricted(seed, n, &rule).unwrap())
                    .unwrap();
            }
        }
    }

    #[test]
    fn generator_gives_up() {
        let rule = SeparationRule {
            min_distance: 0.5,
            dressed: false,
        };
        assert!(matches!(
            generate_restricted(1, 6, &rule),
            Err(Error::GeneratorStuck { .. })
        ));
    }

    #[test]
    fn validator_names_offenders() {
        let rule = SeparationRule::default();
        let p = ModelParams::restricted(vec![re(0.2), re(0.25)], vec![re(-0.3), re(0.4)]).unwrap();
        assert!(matches!(rule.check(&p), Err(Error::Domain(m)) if m.contains("alpha[0]") && m.contains("alpha[1]")));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!(matches!("lu".parse::<Method>(), Err(Error::Usage(_))));
        assert!(matches!(
            run_suite("nope", &[1], &SuiteConfig::default()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn homogeneous_route_needs_equal_fields() {
        let p = ModelParams::restricted(vec![re(0.3); 3], vec![re(-0.4); 3]).unwrap();
        let z = compute(Method::Homogeneous, &p).unwrap();
        assert!(crate::numeric::rel_diff(z, re(0.91f64.powf(4.5) * 0.84f64.powf(4.5))) < 1e-8);
        let q = ModelParams::restricted(vec![re(0.3), re(0.2)], vec![re(-0.4); 2]).unwrap();
        assert!(matches!(compute(Method::Homogeneous, &q), Err(Error::Domain(_))));
        let g = generate_params(1, 2, &SeparationRule::default()).unwrap();
        assert!(matches!(compute(Method::Det, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seed_range("4..=4").unwrap(), vec![4]);
        assert_eq!(parse_seed_range("7").unwrap(), vec![7]);
        assert!(parse_seed_range("3..1").is_err());
        assert!(parse_seed_range("x..2").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("toda", 1e-3).unwrap();
        assert_eq!(t.toda, 1e-3);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("toda", -1.0).is_err());
    }

    #[test]
    fn counting_suite_passes() {
        let r = run_suite("counting", &[1, 2], &SuiteConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.summary.cases, 9);
        assert!(r.cases.windows(2).all(|w| w[0].case_id < w[1].case_id));
    }

    #[test]
    fn failures_carry_inputs() {
        let mut config = SuiteConfig::default();
        config.tolerances.toda = 0.0;
        let r = run_suite("toda", &[3], &config).unwrap();
        let fail = r.failures().next().expect("zero tolerance must fail somewhere");
        let doc = &fail.inputs;
        assert!(doc.get("alpha").is_some() && doc.get("beta").is_some());
    }

    #[test]
    fn report_outputs() {
        let r = run_suite("counting", &[0], &SuiteConfig::default()).unwrap();
        let lines = r.to_json_lines();
        assert_eq!(lines.lines().count(), r.cases.len() + 1);
        let first: CaseRecord = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
        assert_eq!(first, r.cases[0]);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("case_id,method,re,im,residual,ms"));
        assert_eq!(text.lines().count(), r.cases.len() + 1);
    }

    #[test]
    fn sweep_lines() {
        let spec =
            "# comment\n{\"method\":\"bethe\",\"seed\":3,\"n\":3,\"compare\":[\"brute\",\"product-general\"]}\n\n\
                    {\"method\":\"det\",\"seed\":4,\"n\":5,\"restricted\":true,\"compare\":[\"product-restricted\"]}\n";
        let r = run_sweep(spec, &SuiteConfig::default()).unwrap();
        assert_eq!(r.summary.cases, 2);
        assert!(r.passed(), "{:?}", r.cases);
        assert!(
            run_sweep("{\"method\":\"det\"}", &SuiteConfig::default())
                .unwrap()
                .summary
                .failures
                == 1
        );
        assert!(matches!(
            run_sweep("{\"method\":\"nope\"}", &SuiteConfig::default()),
            Err(Error::Schema(_))
        ));
    }
}
