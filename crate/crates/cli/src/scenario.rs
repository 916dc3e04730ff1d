//! Scenario files (`"schema": 1`).
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! lists. Time is in natural units with ħ = 1. A state is either an explicit
//! amplitude list or a basis reference `"name:index"`; the built-in bases are
//! `z` (computational, any dimension) and `x` (Hadamard, dimension 2, labels
//! `+`/`-` or `0`/`1`).

use std::collections::BTreeMap;

use fpf_core::{
    Basis, FixedPoint, HamiltonianSchedule, HermitianOperator, Piece, StateVector, Tolerances, C64,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::SCHEMA_VERSION;

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub schema: u32,
    pub dim: usize,
    pub hamiltonian: HamiltonianSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bases: BTreeMap<String, Vec<Vec<Complex>>>,
    pub fixed_points: Vec<FixedPointSpec>,
    pub query: QuerySpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub pieces: Vec<PieceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_override: Option<Vec<PieceSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub h: Vec<Vec<Complex>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointSpec {
    pub t: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Vector(Vec<Complex>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotSpec {
    pub t: f64,
    pub basis: String,
}

/// Fixed points are referenced by their index in `fixed_points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum QuerySpec {
    Born { prep: usize, t: f64, basis: String },
    Abl { pre: usize, post: usize, t: f64, basis: String },
    Chain { pre: usize, post: usize, interior: Vec<SlotSpec>, selection: Vec<usize> },
    Network { layers: Vec<SlotSpec> },
    Validate,
}

impl QuerySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            QuerySpec::Born { .. } => "born",
            QuerySpec::Abl { .. } => "abl",
            QuerySpec::Chain { .. } => "chain",
            QuerySpec::Network { .. } => "network",
            QuerySpec::Validate => "validate",
        }
    }
}

/// A query with every reference resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Born { prep: FixedPoint, t: f64, basis: Basis },
    Abl { pre: FixedPoint, post: FixedPoint, t: f64, basis: Basis },
    Chain { pre: FixedPoint, post: FixedPoint, interior: Vec<(f64, Basis)>, selection: Vec<usize> },
    Network { times: Vec<f64>, bases: Vec<Basis> },
    Validate,
}

/// A validated scenario. Serializing it reproduces its source spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    spec: ScenarioSpec,
    pub schedule: HamiltonianSchedule,
    pub bases: BTreeMap<String, Basis>,
    pub fixed_points: Vec<FixedPoint>,
    pub query: Query,
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn to_json(&self) -> String {
        self.spec.to_json()
    }
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.spec.serialize(serializer)
    }
}

impl ScenarioSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario spec serializes")
    }

    pub fn validate(self) -> Result<Scenario, CliError> {
        self.validate_with(&[])
    }

    /// Validates with command-line tolerance overrides applied on top of
    /// the file's own `tolerances` block.
    pub fn validate_with(self, overrides: &[(String, f64)]) -> Result<Scenario, CliError> {
        Validator::new(&self, overrides)?.finish(self)
    }
}

pub fn parse_scenario(text: &[u8]) -> Result<Scenario, CliError> {
    parse_scenario_with(text, &[])
}

pub fn parse_scenario_with(text: &[u8], overrides: &[(String, f64)]) -> Result<Scenario, CliError> {
    let text = std::str::from_utf8(text).map_err(|e| CliError::Syntax {
        line: 0,
        column: e.valid_up_to(),
        message: "input is not UTF-8".into(),
    })?;
    // Syntax is checked first so that schema errors are only reported for
    // well-formed JSON.
    if let Err(e) = serde_json::from_str::<serde_json::Value>(text) {
        return Err(CliError::Syntax { line: e.line(), column: e.column(), message: e.to_string() });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ScenarioSpec = serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    spec.validate_with(overrides)
}

fn complex_list(xs: &[Complex]) -> Vec<C64> {
    xs.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn matrix(rows: &[Vec<Complex>], dim: usize, path: &str) -> Result<DMatrix<C64>, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::validation(path, format!("expected a {dim}x{dim} matrix")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

struct Validator {
    dim: usize,
    tol: Tolerances,
    schedule: HamiltonianSchedule,
    bases: BTreeMap<String, Basis>,
}

impl Validator {
    fn new(spec: &ScenarioSpec, overrides: &[(String, f64)]) -> Result<Self, CliError> {
        if spec.schema != SCHEMA_VERSION {
            return Err(CliError::validation(
                "schema",
                format!("unsupported schema {} (expected {SCHEMA_VERSION})", spec.schema),
            ));
        }
        if spec.dim == 0 {
            return Err(CliError::validation("dim", "dimension must be positive"));
        }
        let mut tol = Tolerances::default();
        let file_overrides = spec.tolerances.iter().map(|(k, v)| (k.as_str(), *v, "tolerances"));
        let cli_overrides = overrides.iter().map(|(k, v)| (k.as_str(), *v, "--tol-override"));
        for (name, value, origin) in file_overrides.chain(cli_overrides) {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CliError::validation(format!("{origin}.{name}"), "must be finite and >= 0"));
            }
            if !tol.set(name, value) {
                return Err(CliError::validation(
                    format!("{origin}.{name}"),
                    format!("unknown tolerance; expected one of {:?}", Tolerances::NAMES),
                ));
            }
        }
        let dim = spec.dim;
        let mut v = Self {
            dim,
            tol,
            schedule: HamiltonianSchedule::zero(dim, 0.0, 1.0).expect("placeholder schedule"),
            bases: BTreeMap::new(),
        };
        v.schedule = v.schedule(&spec.hamiltonian)?;
        v.bases = v.bases(&spec.bases)?;
        Ok(v)
    }

    fn pieces(&self, specs: &[PieceSpec], path: &str) -> Result<Vec<Piece>, CliError> {
        if specs.is_empty() {
            return Err(CliError::validation(path, "at least one piece is required"));
        }
        specs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("{path}[{i}]");
                let m = matrix(&p.h, self.dim, &format!("{path}.h"))?;
                let h = HermitianOperator::new(m, self.tol.hermiticity)
                    .map_err(|e| CliError::validation(&path, e))?;
                Ok(Piece::new(p.t_start, p.t_end, h))
            })
            .collect()
    }

    fn schedule(&self, spec: &HamiltonianSpec) -> Result<HamiltonianSchedule, CliError> {
        let pieces = self.pieces(&spec.pieces, "hamiltonian.pieces")?;
        let schedule = HamiltonianSchedule::new(pieces).map_err(|e| match e {
            fpf_core::Error::ScheduleGap { index } => {
                CliError::validation(format!("hamiltonian.pieces[{index}]"), e)
            }
            other => CliError::validation("hamiltonian.pieces", other),
        })?;
        match &spec.branch_override {
            None => Ok(schedule),
            Some(b) => {
                let pieces = self.pieces(b, "hamiltonian.branch_override")?;
                schedule
                    .with_branch_override(pieces)
                    .map_err(|e| CliError::validation("hamiltonian.branch_override", e))
            }
        }
    }

    fn bases(&self, specs: &BTreeMap<String, Vec<Vec<Complex>>>) -> Result<BTreeMap<String, Basis>, CliError> {
        let mut out = BTreeMap::new();
        for (name, vectors) in specs {
            let path = format!("bases.{name}");
            if name == "z" || name == "x" || name.contains(':') {
                return Err(CliError::validation(&path, "reserved basis name"));
            }
            if vectors.len() != self.dim {
                return Err(CliError::validation(&path, format!("expected {} vectors", self.dim)));
            }
            let states = vectors
                .iter()
                .enumerate()
                .map(|(i, v)| self.explicit_state(v, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let basis = Basis::new(states, self.tol.orthonormality)
                .map_err(|e| CliError::validation(&path, e))?;
            out.insert(name.clone(), basis);
        }
        Ok(out)
    }

    fn explicit_state(&self, amps: &[Complex], path: &str) -> Result<StateVector, CliError> {
        if amps.len() != self.dim {
            return Err(CliError::validation(path, format!("expected {} amplitudes", self.dim)));
        }
        let v = StateVector::new(complex_list(amps)).map_err(|e| CliError::validation(path, e))?;
        v.require_normalized(self.tol.normalization)
            .map_err(|e| CliError::validation(path, e))?;
        Ok(v)
    }

    fn basis(&self, name: &str, path: &str) -> Result<Basis, CliError> {
        match name {
            "z" => Ok(Basis::standard(self.dim)),
            "x" if self.dim == 2 => Ok(Basis::hadamard()),
            "x" => Err(CliError::validation(path, "basis 'x' is only defined for dim 2")),
            _ => self
                .bases
                .get(name)
                .cloned()
                .ok_or_else(|| CliError::validation(path, format!("unknown basis '{name}'"))),
        }
    }

    fn named_state(&self, reference: &str, path: &str) -> Result<StateVector, CliError> {
        let (name, label) = reference
            .split_once(':')
            .ok_or_else(|| CliError::validation(path, "state reference must look like 'basis:index'"))?;
        let basis = self.basis(name, path)?;
        let index = match (name, label) {
            ("x", "+") => 0,
            ("x", "-") => 1,
            _ => label
                .parse::<usize>()
                .map_err(|_| CliError::validation(path, format!("bad basis index '{label}'")))?,
        };
        if index >= basis.len() {
            return Err(CliError::validation(path, format!("index {index} out of range")));
        }
        Ok(basis[index].clone())
    }

    fn time(&self, t: f64, path: &str) -> Result<f64, CliError> {
        if !t.is_finite() {
            return Err(CliError::validation(path, "time must be finite"));
        }
        self.schedule
            .require_covered(t)
            .map_err(|e| CliError::validation(path, format!("time {t}: {e}")))?;
        Ok(t)
    }

    fn fixed_point(points: &[FixedPoint], index: usize, path: &str) -> Result<FixedPoint, CliError> {
        points
            .get(index)
            .cloned()
            .ok_or_else(|| CliError::validation(path, format!("no fixed point {index}")))
    }

    fn slots(&self, slots: &[SlotSpec], path: &str) -> Result<Vec<(f64, Basis)>, CliError> {
        slots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let p = format!("{path}[{i}]");
                Ok((self.time(s.t, &format!("{p}.t"))?, self.basis(&s.basis, &format!("{p}.basis"))?))
            })
            .collect()
    }

    fn finish(self, spec: ScenarioSpec) -> Result<Scenario, CliError> {
        let fixed_points = spec
            .fixed_points
            .iter()
            .enumerate()
            .map(|(i, fp)| {
                let path = format!("fixed_points[{i}]");
                let t = self.time(fp.t, &format!("{path}.t"))?;
                let state = match &fp.state {
                    StateSpec::Named(r) => self.named_state(r, &format!("{path}.state"))?,
                    StateSpec::Vector(v) => self.explicit_state(v, &format!("{path}.state"))?,
                };
                Ok(FixedPoint::new(t, state))
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let fp = |i: usize, field: &str| Self::fixed_point(&fixed_points, i, &format!("query.{field}"));
        let query = match &spec.query {
            QuerySpec::Born { prep, t, basis } => Query::Born {
                prep: fp(*prep, "prep")?,
                t: self.time(*t, "query.t")?,
                basis: self.basis(basis, "query.basis")?,
            },
            QuerySpec::Abl { pre, post, t, basis } => Query::Abl {
                pre: fp(*pre, "pre")?,
                post: fp(*post, "post")?,
                t: self.time(*t, "query.t")?,
                basis: self.basis(basis, "query.basis")?,
            },
            QuerySpec::Chain { pre, post, interior, selection } => {
                let interior = self.slots(interior, "query.interior")?;
                if selection.len() != interior.len() {
                    return Err(CliError::validation(
                        "query.selection",
                        format!("{} entries for {} interior points", selection.len(), interior.len()),
                    ));
                }
                for (i, (&s, (_, b))) in selection.iter().zip(&interior).enumerate() {
                    if s >= b.len() {
                        return Err(CliError::validation(format!("query.selection[{i}]"), "index out of range"));
                    }
                }
                Query::Chain {
                    pre: fp(*pre, "pre")?,
                    post: fp(*post, "post")?,
                    interior,
                    selection: selection.clone(),
                }
            }
            QuerySpec::Network { layers } => {
                let (times, bases) = self.slots(layers, "query.layers")?.into_iter().unzip();
                Query::Network { times, bases }
            }
            QuerySpec::Validate => Query::Validate,
        };

        Ok(Scenario {
            schedule: self.schedule,
            bases: self.bases,
            fixed_points,
            query,
            tolerances: self.tol,
            spec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL_BORN: &str = r#"{
        "schema": 1,
        "dim": 2,
        "hamiltonian": {"pieces": [{"t_start": 0.0, "t_end": 1.0,
            "h": [[[0,0],[1,0]],[[1,0],[0,0]]]}]},
        "fixed_points": [{"t": 0.0, "state": "z:0"}],
        "query": {"kind": "born", "prep": 0, "t": 0.7853981633974483, "basis": "z"}
    }"#;

    fn with(edit: impl Fn(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(MINIMAL_BORN).unwrap();
        edit(&mut v);
        v.to_string()
    }

    fn validation_path(text: &str) -> String {
        match parse_scenario(text.as_bytes()) {
            Err(CliError::Validation { path, .. }) => path,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_born_scenario_parses() {
        let s = parse_scenario(MINIMAL_BORN.as_bytes()).unwrap();
        assert_eq!(s.schedule.dim(), 2);
        assert!(matches!(s.query, Query::Born { .. }));
        assert_eq!(s.fixed_points[0].state, StateVector::basis_vector(2, 0));
    }

    #[test]
    fn non_hermitian_piece_is_rejected_with_path() {
        let text = with(|v| v["hamiltonian"]["pieces"][0]["h"][0][1] = serde_json::json!([2.0, 0.0]));
        assert_eq!(validation_path(&text), "hamiltonian.pieces[0]");
    }

    #[test]
    fn time_outside_coverage_is_named() {
        let text = with(|v| v["fixed_points"][0]["t"] = serde_json::json!(3.5));
        match parse_scenario(text.as_bytes()) {
            Err(CliError::Validation { path, message }) => {
                assert_eq!(path, "fixed_points[0].t");
                assert!(message.contains("3.5"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_and_schema_errors() {
        assert!(matches!(parse_scenario(b"{\"schema\": 1,"), Err(CliError::Syntax { .. })));
        let text = with(|v| {
            v.as_object_mut().unwrap().remove("dim");
        });
        assert!(matches!(parse_scenario(text.as_bytes()), Err(CliError::Schema { .. })));
        let text = with(|v| v["dim"] = serde_json::json!("two"));
        match parse_scenario(text.as_bytes()) {
            Err(CliError::Schema { path, .. }) => assert_eq!(path, "dim"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gaps_and_bad_states() {
        let text = with(|v| {
            v["hamiltonian"]["pieces"] = serde_json::json!([
                {"t_start": 0.0, "t_end": 0.5, "h": [[[0,0],[0,0]],[[0,0],[0,0]]]},
                {"t_start": 0.6, "t_end": 1.0, "h": [[[0,0],[0,0]],[[0,0],[0,0]]]}
            ])
        });
        assert_eq!(validation_path(&text), "hamiltonian.pieces[1]");
        let text = with(|v| v["fixed_points"][0]["state"] = serde_json::json!([[1, 0], [1, 0]]));
        assert_eq!(validation_path(&text), "fixed_points[0].state");
        let text = with(|v| v["fixed_points"][0]["state"] = serde_json::json!("q:0"));
        assert_eq!(validation_path(&text), "fixed_points[0].state");
        let text = with(|v| v["query"]["basis"] = serde_json::json!("nope"));
        assert_eq!(validation_path(&text), "query.basis");
        let text = with(|v| v["query"]["prep"] = serde_json::json!(4));
        assert_eq!(validation_path(&text), "query.prep");
    }

    #[test]
    fn named_states_and_custom_bases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = with(|v| {
            v["bases"] = serde_json::json!({"y": [[[h, 0], [0, h]], [[h, 0], [0, -h]]]});
            v["fixed_points"] = serde_json::json!([{"t": 0.0, "state": "x:-"}, {"t": 0.5, "state": "y:1"}]);
        });
        let s = parse_scenario(text.as_bytes()).unwrap();
        assert_eq!(s.fixed_points[0].state, Basis::hadamard()[1]);
        assert_eq!(s.fixed_points[1].state, s.bases["y"][1]);
    }

    #[test]
    fn tolerance_overrides() {
        let text = with(|v| v["tolerances"] = serde_json::json!({"unitarity": 1e-9}));
        let s = parse_scenario(text.as_bytes()).unwrap();
        assert_eq!(s.tolerances.unitarity, 1e-9);
        let s = parse_scenario_with(text.as_bytes(), &[("unitarity".into(), 1e-8)]).unwrap();
        assert_eq!(s.tolerances.unitarity, 1e-8);
        let text = with(|v| v["tolerances"] = serde_json::json!({"bogus": 1.0}));
        assert_eq!(validation_path(&text), "tolerances.bogus");
    }

    #[test]
    fn serialization_round_trips() {
        let s = parse_scenario(MINIMAL_BORN.as_bytes()).unwrap();
        let again = parse_scenario(s.to_json().as_bytes()).unwrap();
        assert_eq!(s, again);
        assert_eq!(serde_json::to_string(&s).unwrap(), serde_json::to_string(s.spec()).unwrap());
    }
}
