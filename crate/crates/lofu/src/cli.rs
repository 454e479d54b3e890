//! Command-line entry point and exit-code contract.
//!
//! Exit codes: 0 success, 2 truncation-insufficient (including
//! enumeration overflow), 3 invalid input, 4 verification failure.
//! Every nonzero exit prints a machine-readable failure record as the
//! last stdout line.

use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::base::BaseSpaces;
use crate::cert::{parse_cochain_doc, CertificateDoc, ParamsDoc};
use crate::cochain::Cochain;
use crate::compat::{diagram_check, CylinderSystem};
use crate::complex::{fixture, SimplicialComplex};
use crate::cover::{Nerve, DEFAULT_TUPLE_CAP};
use crate::error::{LofuError, Result};
use crate::fiber::LoopSystem;
use crate::group::{parse_group_spec, AbelianGroup};
use crate::homology::{class_equal, cohomology};
use crate::lf::{lf_certificate, lf_class_equal};
use crate::regression::regress;
use crate::transgression::transgress;

#[derive(Parser, Debug)]
#[command(name = "lofu", version, about = "Loop-fusion Cech cohomology engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Fixture name (point, interval, circle, triangle, sphere2,
    /// torus9) or path to a complex document.
    #[arg(long)]
    complex: String,
    /// Coefficient group, e.g. `Z`, `Z/2`, `Z^2+Z/6`.
    #[arg(long)]
    group: String,
    /// Cocycle degree k.
    #[arg(long)]
    degree: usize,
    /// Path length budget.
    #[arg(long, default_value_t = 2)]
    lmax: usize,
    /// Basepoint vertex for contractions.
    #[arg(long, default_value_t = 0)]
    basepoint: u8,
    /// Seed for solver variable order and randomized choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write a certificate document here.
    #[arg(long)]
    emit_certificate: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cech cohomology of the star nerve of the complex.
    Cohomology(Common),
    /// Enhanced transgression of a base cocycle.
    Transgress {
        #[command(flatten)]
        common: Common,
        /// Cohomology generator (`gen_0`, `gen_1`, ...) or a cochain
        /// document path.
        #[arg(long, default_value = "gen_0")]
        class: String,
    },
    /// Regression of a loop-fusion cocycle read from a file.
    Regress {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega: std::path::PathBuf,
    },
    /// Both round trips starting from a base class.
    Roundtrip {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "gen_0")]
        class: String,
    },
    /// Verify the loop-fusion certificate of a cochain file.
    VerifyLf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega: std::path::PathBuf,
    },
    /// Compatibility of the cylinder route with the enhanced route.
    Compat(Common),
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            println!(
                "{}",
                serde_json::json!({"failure": {"code": 3, "kind": "invalid-input",
                                   "detail": e.to_string()}})
            );
            return 3;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {e}");
            let kind = match code {
                2 => "truncation",
                3 => "invalid-input",
                _ => "verification-failure",
            };
            println!(
                "{}",
                serde_json::json!({"failure": {"code": code, "kind": kind,
                                   "detail": e.to_string()}})
            );
            code
        }
    }
}

fn load_complex(spec: &str) -> Result<Arc<SimplicialComplex>> {
    if let Ok(c) = fixture(spec) {
        return Ok(c);
    }
    let path = std::path::Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LofuError::invalid(format!("reading {spec}: {e}")))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "complex".into());
        return SimplicialComplex::parse_json(name, &text);
    }
    fixture(spec) // report the fixture error message
}

fn validate(common: &Common) -> Result<(Arc<SimplicialComplex>, AbelianGroup)> {
    if common.lmax < 1 {
        return Err(LofuError::invalid("--lmax must be at least 1"));
    }
    let complex = load_complex(&common.complex)?;
    if (common.basepoint as usize) >= complex.vertex_count() {
        return Err(LofuError::invalid("--basepoint out of range"));
    }
    let group = parse_group_spec(&common.group)?;
    Ok((complex, group))
}

fn params(command: &str, common: &Common) -> ParamsDoc {
    ParamsDoc {
        command: command.into(),
        complex: common.complex.clone(),
        group: common.group.clone(),
        degree: common.degree,
        lmax: common.lmax,
        basepoint: common.basepoint,
        seed: common.seed,
    }
}

fn emit(common: &Common, doc: &CertificateDoc) -> Result<()> {
    if let Some(path) = &common.emit_certificate {
        std::fs::write(path, doc.to_bytes())
            .map_err(|e| LofuError::invalid(format!("writing certificate: {e}")))?;
        println!("certificate written to {}", path.display());
    }
    Ok(())
}

fn build_system(common: &Common) -> Result<LoopSystem> {
    let (complex, group) = validate(common)?;
    if common.degree < 1 {
        return Err(LofuError::invalid("--degree must be at least 1"));
    }
    LoopSystem::build(
        &complex,
        &group,
        common.degree,
        common.lmax,
        common.basepoint,
        common.seed,
        DEFAULT_TUPLE_CAP,
    )
}

/// Resolve `--class`: a cohomology generator by index or a cochain file.
fn resolve_class(sys: &LoopSystem, spec: &str) -> Result<Cochain> {
    if let Some(idx) = spec.strip_prefix("gen_") {
        let i: usize = idx
            .parse()
            .map_err(|_| LofuError::invalid(format!("bad generator `{spec}`")))?;
        let h = cohomology(sys.base.nerve(1), &sys.group, sys.k)?;
        return h.generators.into_iter().nth(i).ok_or_else(|| {
            LofuError::invalid(format!("generator {i} out of range (H has fewer generators)"))
        });
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| LofuError::invalid(format!("reading {spec}: {e}")))?;
    read_cochain(&text, sys.base.nerve(1), &sys.group)
}

/// Validate a cochain document against a nerve: the degree must fit and
/// every stored tuple must receive exactly one value.
pub fn read_cochain(text: &str, nerve: &Arc<Nerve>, group: &AbelianGroup) -> Result<Cochain> {
    let doc = parse_cochain_doc(text)?;
    let mut c = Cochain::zero(nerve, group, doc.degree)?;
    let expected = nerve.count(doc.degree + 1);
    if doc.values.len() != expected {
        return Err(LofuError::invalid(format!(
            "cochain document has {} entries, nerve level holds {expected}",
            doc.values.len()
        )));
    }
    for (tuple, coords) in &doc.values {
        if coords.len() != group.dim() {
            return Err(LofuError::invalid("coordinate vector has wrong length"));
        }
        let id = nerve.require_tuple_id(tuple)?;
        c.set_value(id, coords);
    }
    Ok(c)
}

fn omega_from_file(sys: &LoopSystem, path: &std::path::Path) -> Result<Cochain> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LofuError::invalid(format!("reading {}: {e}", path.display())))?;
    let omega = read_cochain(&text, &sys.lambda, &sys.group)?;
    if omega.degree + 1 != sys.k {
        return Err(LofuError::invalid(format!(
            "omega has degree {}, expected {}",
            omega.degree,
            sys.k - 1
        )));
    }
    Ok(omega)
}

fn print_reports(reports: &[crate::lf::IdentityReport]) {
    for r in reports {
        println!(
            "{}: {} (domain {})",
            r.name,
            if r.holds { "verified" } else { "FAILED" },
            r.domain
        );
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Cohomology(common) => {
            let (complex, group) = validate(&common)?;
            let k = common.degree;
            let base = BaseSpaces::build(&complex, &[k + 2], DEFAULT_TUPLE_CAP)?;
            let h = cohomology(base.nerve(1), &group, k)?;
            println!("{}", h.group);
            let mut doc = CertificateDoc::new(params("cohomology", &common));
            for (i, g) in h.generators.iter().enumerate() {
                doc.push_cochain(&format!("gen_{i}"), g);
            }
            emit(&common, &doc)
        }
        Command::Transgress { common, class } => {
            let sys = build_system(&common)?;
            let alpha = resolve_class(&sys, &class)?;
            let cert = transgress(&sys, &alpha)?;
            print_reports(&cert.reports);
            print_reports(&cert.lf.reports);
            println!("transgression complete; class is -[omega]");
            let mut doc = CertificateDoc::new(params("transgress", &common));
            doc.push_identities(&cert.reports);
            doc.push_identities(&cert.lf.reports);
            doc.push_cochain("alpha", &cert.alpha);
            doc.push_cochain("beta", &cert.beta);
            doc.push_cochain("omega", &cert.omega);
            if let Some(eta) = &cert.eta {
                doc.push_cochain("eta", eta);
            }
            if let Some(g) = &cert.lf.g {
                doc.push_cochain("g", g);
            }
            emit(&common, &doc)
        }
        Command::Regress { common, omega } => {
            let sys = build_system(&common)?;
            let omega = omega_from_file(&sys, &omega)?;
            let cert = regress(&sys, &omega)?;
            print_reports(&cert.lf.reports);
            print_reports(&cert.reports);
            println!("regression complete; class is -[alpha]");
            let mut doc = CertificateDoc::new(params("regress", &common));
            doc.push_identities(&cert.lf.reports);
            doc.push_identities(&cert.reports);
            doc.push_cochain("omega", &cert.omega);
            doc.push_cochain("kappa", &cert.kappa);
            doc.push_cochain("tau", &cert.tau);
            doc.push_cochain("alpha", &cert.alpha);
            doc.push_cochain("mu", &cert.mu);
            emit(&common, &doc)
        }
        Command::Roundtrip { common, class } => {
            let sys = build_system(&common)?;
            let alpha = resolve_class(&sys, &class)?;
            let t = transgress(&sys, &alpha)?;
            let r = regress(&sys, &t.omega)?;
            let back = class_equal(&r.alpha, &alpha, sys.seed)?;
            if back.is_none() {
                return Err(LofuError::verification(
                    "regress(transgress(alpha)) is class-equal to alpha",
                    "no coboundary witness",
                ));
            }
            println!("regress(transgress(alpha)) ~ alpha: verified");
            let t2 = transgress(&sys, &r.alpha)?;
            if lf_class_equal(&sys, &t.omega, &t2.omega)?.is_none() {
                return Err(LofuError::verification(
                    "transgress(regress(omega)) is lf-class-equal to omega",
                    "no fusion witness",
                ));
            }
            println!("transgress(regress(omega)) ~ omega: verified");
            let mut doc = CertificateDoc::new(params("roundtrip", &common));
            doc.push_identities(&t.reports);
            doc.push_identities(&t.lf.reports);
            doc.push_identities(&r.reports);
            doc.push_cochain("alpha", &alpha);
            doc.push_cochain("omega", &t.omega);
            doc.push_cochain("alpha_back", &r.alpha);
            emit(&common, &doc)
        }
        Command::VerifyLf { common, omega } => {
            let sys = build_system(&common)?;
            let omega = omega_from_file(&sys, &omega)?;
            let cert = lf_certificate(&sys, &omega, None)?;
            print_reports(&cert.reports);
            println!("loop-fusion certificate verified");
            let mut doc = CertificateDoc::new(params("verify-lf", &common));
            doc.push_identities(&cert.reports);
            doc.push_cochain("omega", &cert.omega);
            if let Some(g) = &cert.g {
                doc.push_cochain("g", g);
            }
            emit(&common, &doc)
        }
        Command::Compat(common) => {
            let sys = build_system(&common)?;
            let cyl = CylinderSystem::build(&sys, DEFAULT_TUPLE_CAP)?;
            let h = cohomology(sys.base.nerve(1), &sys.group, sys.k)?;
            let alpha = match h.generators.first() {
                Some(g) => g.clone(),
                None => Cochain::zero(sys.base.nerve(1), &sys.group, sys.k)?,
            };
            let t = transgress(&sys, &alpha)?;
            let outcome = diagram_check(&sys, &cyl, &alpha, &t.omega)?;
            print_reports(&outcome.identities);
            println!("diagram commutes");
            let mut doc = CertificateDoc::new(params("compat", &common));
            doc.push_identities(&outcome.identities);
            doc.push_cochain("standard", &outcome.standard);
            doc.push_cochain("omega", &t.omega);
            emit(&common, &doc)
        }
    }
}
