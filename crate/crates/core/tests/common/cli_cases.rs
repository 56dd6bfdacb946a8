use std::path::{Path, PathBuf};

use gradua::cli::{run, Command, JobDescription, JobOptions, Report};

pub struct Case {
    pub name: &'static str,
    pub command: &'static str,
    pub input: &'static str,
    pub options: JobOptions,
    pub exit: i32,
}

fn case(name: &'static str, command: &'static str, input: &'static str, exit: i32) -> Case {
    Case {
        name,
        command,
        input,
        options: JobOptions::default(),
        exit,
    }
}

fn with(mut c: Case, f: impl FnOnce(&mut JobOptions)) -> Case {
    f(&mut c.options);
    c
}

pub fn cases() -> Vec<Case> {
    vec![
        case("ce_so3", "ce", "so3.json", 0),
        case("check_q_so3", "check-q", "so3.json", 0),
        case("check_q_broken_jacobi", "check-q", "broken_jacobi.json", 1),
        case("ce_broken_jacobi", "ce", "broken_jacobi.json", 1),
        case(
            "derived_bracket_so3",
            "derived-bracket",
            "ce_field_so3.json",
            0,
        ),
        case(
            "linfinity_three_term",
            "linfinity",
            "linfinity_three_term.json",
            0,
        ),
        case(
            "linfinity_broken_cubic",
            "linfinity",
            "linfinity_broken_cubic.json",
            1,
        ),
        with(
            case(
                "linfinity_arity_2",
                "linfinity",
                "linfinity_three_term.json",
                0,
            ),
            |o| o.max_arity = Some(2),
        ),
        case(
            "algebroid_tangent",
            "algebroid",
            "algebroid_tangent.json",
            0,
        ),
        case(
            "algebroid_so3_action",
            "algebroid",
            "algebroid_so3_action.json",
            0,
        ),
        case(
            "algebroid_so3_perturbed",
            "algebroid",
            "algebroid_so3_perturbed.json",
            1,
        ),
        case(
            "check_q_algebroid_perturbed",
            "check-q",
            "algebroid_so3_perturbed.json",
            1,
        ),
        case("commutator", "commutator", "commutator.json", 0),
        case("apply", "apply", "apply.json", 0),
        with(case("eval", "eval", "eval.json", 0), |o| {
            o.point = Some("1,1/2".into());
            o.precision = Some(4);
        }),
        with(case("eval_wrong_arity", "eval", "eval.json", 2), |o| {
            o.point = Some("1".into())
        }),
        with(case("eval_bad_point", "eval", "eval.json", 2), |o| {
            o.point = Some("1,x".into())
        }),
        with(case("taylor", "taylor", "taylor.json", 0), |o| {
            o.point = Some("2".into());
            o.order = Some(2);
        }),
        case("invert", "invert", "invert.json", 0),
        with(
            case("invert_truncation_2", "invert", "invert.json", 0),
            |o| o.truncation = Some(2),
        ),
        case(
            "invert_nonconstant_body",
            "invert",
            "invert_nonconstant_body.json",
            2,
        ),
        case("dup_coord", "check-q", "dup_coord.json", 2),
        case("bad_rational", "eval", "bad_rational.json", 2),
        case("unknown_coord", "apply", "unknown_coord.json", 2),
        case("not_antisymmetric", "ce", "not_antisymmetric.json", 2),
        case("missing_truncation", "eval", "missing_truncation.json", 2),
        case("check_q_nothing_to_check", "check-q", "chart_only.json", 2),
    ]
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn job(c: &Case) -> JobDescription {
    JobDescription {
        command: c.command.parse::<Command>().unwrap(),
        input: std::fs::read_to_string(fixture_dir().join(c.input)).unwrap(),
        options: c.options.clone(),
    }
}

/// The rendered report with the timing field zeroed.
pub fn stable_render(report: &Report) -> String {
    let mut r = report.clone();
    r.timing_us = 0;
    r.render()
}

/// Outcome of comparing one case against its golden file.
pub fn check_case(c: &Case) -> Result<(), String> {
    let report = run(&job(c));
    let text = stable_render(&report);
    if report.exit_code() != c.exit {
        return Err(format!(
            "{}: exit {} (expected {})\n{text}",
            c.name,
            report.exit_code(),
            c.exit
        ));
    }
    if report.exit_code() == 1 && report.witness.is_none() {
        return Err(format!("{}: fail report without witness", c.name));
    }
    let again = stable_render(&run(&job(c)));
    if again != text {
        return Err(format!("{}: output differs between runs", c.name));
    }
    let path = golden_dir().join(format!("{}.json", c.name));
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, &text).unwrap();
        return Ok(());
    }
    let golden = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: cannot read golden {}: {e}", c.name, path.display()))?;
    if golden != text {
        return Err(format!(
            "{}: report differs from golden\n--- golden\n{golden}--- actual\n{text}",
            c.name
        ));
    }
    Ok(())
}
