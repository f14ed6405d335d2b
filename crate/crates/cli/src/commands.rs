use std::io::Read;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use varexp::operators::{
    apply_injection, check_isometry_randomized, check_isomodular_structural, recover_structure,
    theta_isometry_decision, InjectionMap, MatrixOperator, Operator, ThetaDecision, DEFAULT_PROBES,
};
use varexp::space::{luxemburg_norm, modular as rho, ExponentSequence, SparseSequence, DEFAULT_TOL};
use varexp::verify::{self, SuiteReport};

use crate::{Common, ExampleId, SuiteName};

const ISOMETRY_TOL: f64 = 1e-9;
const ISOMETRY_TRIALS: u64 = 200;
const DEFAULT_THETA_N: usize = 8;
const DEFAULT_EXAMPLE_N: usize = 20;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage", message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { kind: "invalid_input", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: "io", message: message.into() }
    }
}

impl From<varexp::Error> for CliError {
    fn from(e: varexp::Error) -> Self {
        Self { kind: "computation", message: e.to_string() }
    }
}

pub struct Outcome {
    pub result: Map<String, Value>,
    pub passed: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self::new(result, true)
    }

    fn new(result: Value, passed: bool) -> Self {
        let Value::Object(result) = result else {
            unreachable!("results are JSON objects");
        };
        Self { result, passed }
    }

    fn report(report: SuiteReport, deterministic: bool) -> Self {
        let passed = report.pass;
        let report = if deterministic { report.deterministic() } else { report };
        Self::new(to_value(&report), passed)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

/// An inline JSON object, `-` for stdin, or a file path.
pub fn read_input(arg: &str) -> Result<Value, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::io(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::io(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("malformed JSON: {e}")))
}

fn parse<T: DeserializeOwned>(input: Option<Value>) -> Result<T, CliError> {
    let value = input.ok_or_else(|| CliError::usage("this command needs --input"))?;
    serde_json::from_value(value).map_err(|e| CliError::input(e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceInput {
    a: SparseSequence,
    p: ExponentSequence,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    a: SparseSequence,
    b: SparseSequence,
    p: ExponentSequence,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplyInput {
    operator: Operator,
    x: SparseSequence,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorInput {
    operator: Operator,
    p: ExponentSequence,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaInput {
    theta: InjectionMap,
    p: ExponentSequence,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExponentInput {
    p: ExponentSequence,
}

/// Operator suites run on generated operators unless `operators` is given.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSuiteInput {
    p: ExponentSequence,
    #[serde(default)]
    operators: Option<Vec<Operator>>,
}

fn operator_suite(
    input: Option<Value>,
    common: &Common,
    on: fn(&ExponentSequence, &[MatrixOperator], u64) -> varexp::Result<SuiteReport>,
    generated: fn(&ExponentSequence, u64, u64) -> varexp::Result<SuiteReport>,
) -> Result<SuiteReport, CliError> {
    let OperatorSuiteInput { p, operators } = parse(input)?;
    Ok(match operators {
        Some(ops) => {
            let matrices = ops.iter().map(|op| op.to_matrix(None)).collect::<varexp::Result<Vec<_>>>()?;
            on(&p, &matrices, common.seed)?
        }
        None => generated(&p, common.trials.unwrap_or(50), common.seed)?,
    })
}

pub fn norm(common: &Common, input: Option<Value>) -> Result<Outcome, CliError> {
    let SequenceInput { a, p } = parse(input)?;
    let r = luxemburg_norm(&a, &p, common.tol.unwrap_or(DEFAULT_TOL))?;
    Ok(Outcome::ok(json!({"norm": r.value, "residual": r.residual, "iterations": r.iterations})))
}

pub fn modular(input: Option<Value>) -> Result<Outcome, CliError> {
    let SequenceInput { a, p } = parse(input)?;
    Ok(Outcome::ok(json!({"modular": rho(&a, &p)?})))
}

pub fn clarkson(input: Option<Value>) -> Result<Outcome, CliError> {
    let PairInput { a, b, p } = parse(input)?;
    let sample = verify::clarkson_gap(&a, &b, &p)?;
    Ok(Outcome::ok(json!({"gap": sample.gap, "disjoint": sample.disjoint, "regime": p.regime()})))
}

pub fn apply(input: Option<Value>) -> Result<Outcome, CliError> {
    let ApplyInput { operator, x } = parse(input)?;
    Ok(Outcome::ok(json!({"result": operator.apply(&x)?})))
}

pub fn check_op(common: &Common, input: Option<Value>) -> Result<Outcome, CliError> {
    let OperatorInput { operator, p } = parse(input)?;
    let m = operator.to_matrix(common.n)?;
    let certificate = check_isomodular_structural(&m, &p, DEFAULT_PROBES, common.seed);
    let trials = common.trials.unwrap_or(ISOMETRY_TRIALS) as usize;
    let isometry = check_isometry_randomized(&m, &p, trials, common.tol.unwrap_or(ISOMETRY_TOL), common.seed)?;
    Ok(Outcome::ok(json!({
        "dimension": m.dimension(),
        "isomodular": certificate,
        "isometry": isometry,
    })))
}

pub fn recover(input: Option<Value>) -> Result<Outcome, CliError> {
    let OperatorInput { operator, p } = parse(input)?;
    let m = operator.to_matrix(None)?;
    let recovered = recover_structure(&m, &p)?;
    let max_modulus = recovered.max_multiplier_modulus();
    let exact = recovered.reconstruct(m.dimension(), m.rows())? == m;
    let operator = Operator::Lamperti(recovered.into_operator()?);
    Ok(Outcome::ok(json!({
        "operator": operator,
        "max_multiplier_modulus": max_modulus,
        "reconstruction_exact": exact,
    })))
}

pub fn theta_check(common: &Common, input: Option<Value>) -> Result<Outcome, CliError> {
    let ThetaInput { theta, p } = parse(input)?;
    let n = common.n.or(theta.domain_bound()).unwrap_or(DEFAULT_THETA_N);
    let decision = theta_isometry_decision(&theta, &p, n);
    let mut result = to_value(&decision);
    result["n"] = json!(n);
    if let ThetaDecision::NotIsometric { witness, .. } = &decision {
        result["witness_norm"] = json!(luxemburg_norm(witness, &p, DEFAULT_TOL)?.value);
        if let Ok(image) = apply_injection(&theta, witness) {
            result["witness_image_norm"] = json!(luxemburg_norm(&image, &p, DEFAULT_TOL)?.value);
        }
    }
    Ok(Outcome::ok(result))
}

pub fn suite(name: SuiteName, common: &Common, input: Option<Value>) -> Result<Outcome, CliError> {
    let seed = common.seed;
    let report = match name {
        SuiteName::Clarkson => {
            let ExponentInput { p } = parse(input)?;
            verify::suite_clarkson(&p, common.trials.unwrap_or(1000), seed)?
        }
        SuiteName::Orthogonality => operator_suite(
            input,
            common,
            verify::suite_orthogonality_on,
            verify::suite_orthogonality,
        )?,
        SuiteName::Structure => operator_suite(
            input,
            common,
            verify::suite_structure_theorem_on,
            verify::suite_structure_theorem,
        )?,
        SuiteName::ShiftDichotomy => verify::suite_shift_dichotomy(common.trials.unwrap_or(500), seed)?,
    };
    Ok(Outcome::report(report, common.deterministic))
}

pub fn example(id: ExampleId, common: &Common) -> Result<Outcome, CliError> {
    let n = common.n.unwrap_or(DEFAULT_EXAMPLE_N);
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    Ok(match id {
        ExampleId::Shift => Outcome::ok(to_value(&verify::reproduce_example_41(n))),
        ExampleId::Transpositions => Outcome::report(verify::reproduce_example_42(n), common.deterministic),
    })
}

pub fn explore(common: &Common, input: Option<Value>) -> Result<Outcome, CliError> {
    let ExponentInput { p } = parse(input)?;
    let budget = common.trials.unwrap_or(300);
    if budget == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    Ok(Outcome::ok(to_value(&verify::explore_isometric_not_isomodular(&p, budget, common.seed)?)))
}
