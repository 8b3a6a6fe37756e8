//! Command-line verifier for quantum U-channel checks.
//!
//! Every subcommand loads its inputs from JSON files, writes a verification
//! report (to `--out` or stdout), and exits 0 on pass, 1 on fail, 2 on an
//! undetermined verdict, and 3 on malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use uchannel::cmatrix::{ComplexMatrix, Tolerance};
use uchannel::corpus;
use uchannel::nilpotent;
use uchannel::quantum::{
    self, BipartiteUState, EbVerdict, SeparabilityVerdict,
};
use uchannel::report::{digest_of, Evidence, VerificationReport, Verdict};
use uchannel::sspace::SSpaceContext;
use uchannel::umap::{self, KrausUForm, MatrixMap};

#[derive(Parser)]
#[command(
    name = "uchannel",
    about = "Verify U-positivity, U-CP maps, quantum U-states/channels and the bundled example corpus",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Relative eigenvalue floor for PSD decisions
    #[arg(long = "tol-psd", default_value_t = 1e-9, global = true)]
    tol_psd: f64,
    /// Relative Frobenius floor for equality decisions
    #[arg(long = "tol-eq", default_value_t = 1e-9, global = true)]
    tol_eq: f64,
    /// Seed for randomized checks
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    /// Write the report JSON here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a matrix is a valid fundamental unitary
    CheckUnitary {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Check U-positivity of an operator over a context
    CheckUpositive {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Validate a quantum U-state
    CheckUstate {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long)]
        rho: PathBuf,
    },
    /// Check complete (U_A, U_B)-positivity of a map
    CheckUcp {
        #[arg(long, conflicts_with_all = ["map", "src", "dst"])]
        form: Option<PathBuf>,
        #[arg(long, requires = "src", requires = "dst")]
        map: Option<PathBuf>,
        #[arg(long)]
        src: Option<PathBuf>,
        #[arg(long)]
        dst: Option<PathBuf>,
    },
    /// Assemble the Choi U-matrix of a map
    ChoiU {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        src: PathBuf,
    },
    /// Extract a Kraus U-decomposition from a U-CP map
    KrausU {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        dst: PathBuf,
    },
    /// Stinespring U-dilation of a Kraus U-form
    Dilate {
        #[arg(long)]
        form: PathBuf,
    },
    /// Nilpotency order, type and kernel filtration of an endomorphic form
    NilpotentProfile {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "p-max", default_value_t = 8)]
        p_max: usize,
    },
    /// U-PPT check for a bipartite U-state
    CheckUppt {
        #[arg(long)]
        state: PathBuf,
    },
    /// Separability verdict for a bipartite U-state
    Separability {
        #[arg(long)]
        state: PathBuf,
    },
    /// Entanglement-breaking verdict for a quantum U-channel
    CheckEb {
        #[arg(long)]
        form: PathBuf,
    },
    /// Probe the PPT-squared behavior of a channel pair or random ensemble
    PptSquaredProbe {
        #[arg(long, requires = "f2")]
        f1: Option<PathBuf>,
        #[arg(long)]
        f2: Option<PathBuf>,
        /// Run this many random qubit U-PPT channel pairs instead
        #[arg(long, conflicts_with_all = ["f1", "f2"])]
        trials: Option<usize>,
    },
    /// Reproduce the bundled worked-example corpus
    VerifyCorpus,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerance::new(cli.common.tol_psd, cli.common.tol_eq) {
        Ok(tol) => tol,
        Err(err) => {
            eprintln!("input error: {err}");
            return ExitCode::from(3);
        }
    };
    match run(&cli.command, &cli.common, &tol) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("input error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let value = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok((value, digest_of(&String::from_utf8_lossy(&bytes).into_owned())))
}

fn emit(common: &Common, report: &impl serde::Serialize) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    match &common.out {
        Some(path) => fs::write(path, json.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn finish(common: &Common, report: VerificationReport) -> Result<u8> {
    let code = report.verdict.exit_code() as u8;
    emit(common, &report)?;
    Ok(code)
}

fn run(command: &Command, common: &Common, tol: &Tolerance) -> Result<u8> {
    match command {
        Command::CheckUnitary { matrix } => {
            let (m, digest): (ComplexMatrix, _) = load(matrix)?;
            let mut evidence = Vec::new();
            let verdict = match SSpaceContext::new(m, tol) {
                Ok(ctx) => {
                    evidence.push(Evidence::scalar("dim", ctx.dim() as f64));
                    Verdict::Pass
                }
                Err(err) => {
                    evidence.push(Evidence::text("rejection", err.to_string()));
                    Verdict::Fail
                }
            };
            finish(common, VerificationReport::new("check-unitary", verdict, evidence, digest))
        }
        Command::CheckUpositive { ctx, op } => {
            let (ctx, d1): (SSpaceContext, _) = load(ctx)?;
            let (op, d2): (ComplexMatrix, _) = load(op)?;
            let check = ctx.u_positive_check(&op, tol)?;
            let evidence = vec![
                Evidence::eigenvalues("u_adj_op_spectrum", &check.eigenvalues),
                Evidence::scalar("hermitian_deviation", check.hermitian_deviation),
            ];
            finish(
                common,
                VerificationReport::new(
                    "check-upositive",
                    Verdict::from_bool(check.psd),
                    evidence,
                    digest_of(&[d1, d2]),
                ),
            )
        }
        Command::CheckUstate { ctx, rho } => {
            let (ctx, d1): (SSpaceContext, _) = load(ctx)?;
            let (rho, d2): (ComplexMatrix, _) = load(rho)?;
            let mut evidence = Vec::new();
            let check = ctx.u_positive_check(&rho, tol)?;
            evidence.push(Evidence::eigenvalues("u_adj_rho_spectrum", &check.eigenvalues));
            let trace = ctx.u_adjoint_matrix().multiply(&rho)?.trace()?;
            evidence.push(Evidence::scalar("u_trace_re", trace.re));
            evidence.push(Evidence::scalar("u_trace_im", trace.im));
            let verdict = match quantum::make_u_state(&ctx, rho, tol) {
                Ok(_) => Verdict::Pass,
                Err(err) => {
                    evidence.push(Evidence::text("rejection", err.to_string()));
                    Verdict::Fail
                }
            };
            finish(
                common,
                VerificationReport::new("check-ustate", verdict, evidence, digest_of(&[d1, d2])),
            )
        }
        Command::CheckUcp { form, map, src, dst } => {
            let (psi, src_ctx, dst_ctx, digest) = match (form, map) {
                (Some(form), None) => {
                    let (form, digest): (KrausUForm, _) = load(form)?;
                    (form.induced_map(), form.src().clone(), form.dst().clone(), digest)
                }
                (None, Some(map)) => {
                    let (psi, d1): (MatrixMap, _) = load(map)?;
                    let (src, d2): (SSpaceContext, _) =
                        load(src.as_ref().context("--src is required with --map")?)?;
                    let (dst, d3): (SSpaceContext, _) =
                        load(dst.as_ref().context("--dst is required with --map")?)?;
                    (psi, src, dst, digest_of(&[d1, d2, d3]))
                }
                _ => anyhow::bail!("pass either --form or --map with --src/--dst"),
            };
            let check = umap::ucp_check(&psi, &src_ctx, &dst_ctx, tol)?;
            let evidence = vec![
                Evidence::eigenvalues("twisted_choi_u_spectrum", &check.eigenvalues),
                Evidence::scalar("hermitian_deviation", check.hermitian_deviation),
            ];
            finish(
                common,
                VerificationReport::new(
                    "check-ucp",
                    Verdict::from_bool(check.psd),
                    evidence,
                    digest,
                ),
            )
        }
        Command::ChoiU { map, src } => {
            let (psi, d1): (MatrixMap, _) = load(map)?;
            let (src_ctx, d2): (SSpaceContext, _) = load(src)?;
            let choi_u = umap::choi_u_matrix(&psi, &src_ctx)?;
            let evidence = vec![Evidence::matrix("choi_u_matrix", choi_u)];
            finish(
                common,
                VerificationReport::new("choi-u", Verdict::Pass, evidence, digest_of(&[d1, d2])),
            )
        }
        Command::KrausU { map, src, dst } => {
            let (psi, d1): (MatrixMap, _) = load(map)?;
            let (src_ctx, d2): (SSpaceContext, _) = load(src)?;
            let (dst_ctx, d3): (SSpaceContext, _) = load(dst)?;
            let digest = digest_of(&[d1, d2, d3]);
            let ucp = umap::ucp_check(&psi, &src_ctx, &dst_ctx, tol)?;
            let mut evidence =
                vec![Evidence::eigenvalues("twisted_choi_u_spectrum", &ucp.eigenvalues)];
            let verdict = match umap::kraus_u_form(&psi, &src_ctx, &dst_ctx, tol) {
                Ok(form) => {
                    let residual = form.induced_map().distance(&psi)?;
                    evidence.push(Evidence::scalar("kraus_count", form.kraus().len() as f64));
                    evidence.push(Evidence::scalar("reassembly_residual", residual));
                    for (i, r) in form.kraus().iter().enumerate() {
                        evidence.push(Evidence::matrix(format!("kraus_{i}"), r.clone()));
                    }
                    Verdict::from_bool(residual <= 1e-8)
                }
                Err(err) => {
                    evidence.push(Evidence::text("rejection", err.to_string()));
                    Verdict::Fail
                }
            };
            finish(common, VerificationReport::new("kraus-u", verdict, evidence, digest))
        }
        Command::Dilate { form } => {
            let (form, digest): (KrausUForm, _) = load(form)?;
            let dilation = umap::stinespring_u_dilation(&form);
            let m = form.src().dim();
            let mut residual: f64 = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let unit = ComplexMatrix::matrix_unit(m, m, i, j);
                    let direct = form.apply_u(&unit)?;
                    let rebuilt = dilation.reconstruct(form.dst(), &unit)?;
                    residual = residual.max(rebuilt.sub(&direct)?.frobenius_norm());
                }
            }
            let isometry_defect = dilation
                .r
                .adjoint()
                .multiply(&dilation.r)?
                .sub(&ComplexMatrix::identity(form.dst().dim()))?
                .frobenius_norm();
            let evidence = vec![
                Evidence::scalar("dilation_dim", dilation.dilation_dim as f64),
                Evidence::scalar("reconstruction_residual", residual),
                Evidence::scalar("isometry_defect", isometry_defect),
                Evidence::matrix("r", dilation.r.clone()),
                Evidence::matrix("u_dilation", dilation.u_dilation.clone()),
            ];
            finish(
                common,
                VerificationReport::new(
                    "dilate",
                    Verdict::from_bool(residual <= 1e-8),
                    evidence,
                    digest,
                ),
            )
        }
        Command::NilpotentProfile { form, p_max } => {
            let (form, digest): (KrausUForm, _) = load(form)?;
            let mut evidence = Vec::new();
            let verdict = match nilpotent::nilpotent_profile(&form, *p_max, tol) {
                Ok(profile) => {
                    evidence.push(Evidence::scalar("order", profile.order as f64));
                    evidence.push(Evidence::text(
                        "profile",
                        serde_json::to_string(&profile)?,
                    ));
                    Verdict::Pass
                }
                Err(uchannel::Error::NotNilpotent { p_max }) => {
                    evidence.push(Evidence::text(
                        "outcome",
                        format!("no nilpotent order found up to p_max = {p_max}"),
                    ));
                    Verdict::Undetermined
                }
                Err(err) => return Err(err.into()),
            };
            finish(common, VerificationReport::new("nilpotent-profile", verdict, evidence, digest))
        }
        Command::CheckUppt { state } => {
            let (state, digest): (BipartiteUState, _) = load(state)?;
            let check = quantum::u_ppt_check(&state, tol)?;
            let evidence = vec![Evidence::eigenvalues("u_ppt_spectrum", &check.eigenvalues)];
            finish(
                common,
                VerificationReport::new(
                    "check-uppt",
                    Verdict::from_bool(check.psd),
                    evidence,
                    digest,
                ),
            )
        }
        Command::Separability { state } => {
            let (state, digest): (BipartiteUState, _) = load(state)?;
            let report = quantum::separability_verdict(&state, tol)?;
            let verdict = match report.verdict {
                SeparabilityVerdict::SeparableCertified => Verdict::Pass,
                SeparabilityVerdict::EntangledCertified(_) => Verdict::Fail,
                SeparabilityVerdict::Undetermined => Verdict::Undetermined,
            };
            let evidence = vec![
                Evidence::text("verdict", format!("{:?}", report.verdict)),
                Evidence::eigenvalues("u_ppt_spectrum", &report.ppt.eigenvalues),
                Evidence::scalar("ccnr", report.ccnr),
                Evidence::flag("dimension_rule_applied", report.dimension_rule_applied),
            ];
            finish(common, VerificationReport::new("separability", verdict, evidence, digest))
        }
        Command::CheckEb { form } => {
            let (form, digest): (KrausUForm, _) = load(form)?;
            let report = quantum::is_u_entanglement_breaking(&form, tol)?;
            let verdict = match report.verdict {
                EbVerdict::Yes => Verdict::Pass,
                EbVerdict::No => Verdict::Fail,
                EbVerdict::Undetermined => Verdict::Undetermined,
            };
            let evidence = vec![
                Evidence::text("eb_verdict", format!("{:?}", report.verdict)),
                Evidence::eigenvalues("choi_state_spectrum", &report.choi_spectrum),
                Evidence::eigenvalues("u_ppt_spectrum", &report.separability.ppt.eigenvalues),
                Evidence::scalar("ccnr", report.separability.ccnr),
            ];
            finish(common, VerificationReport::new("check-eb", verdict, evidence, digest))
        }
        Command::PptSquaredProbe { f1, f2, trials } => match (f1, f2, trials) {
            (Some(f1), Some(f2), None) => {
                let (first, d1): (KrausUForm, _) = load(f1)?;
                let (second, d2): (KrausUForm, _) = load(f2)?;
                let report = quantum::ppt_squared_probe(&first, &second, tol)?;
                let verdict = match report.eb_verdict {
                    Some(EbVerdict::Yes) => Verdict::Pass,
                    Some(EbVerdict::No) => Verdict::Fail,
                    _ => Verdict::Undetermined,
                };
                let evidence = vec![
                    Evidence::flag("composable", report.composable),
                    Evidence::flag("ppt_inputs", report.ppt_inputs),
                    Evidence::flag("composite_is_channel", report.composite_is_channel),
                    Evidence::text("eb_verdict", format!("{:?}", report.eb_verdict)),
                    Evidence::eigenvalues("choi_spectrum", &report.choi_spectrum),
                ];
                finish(
                    common,
                    VerificationReport::new(
                        "ppt-squared-probe",
                        verdict,
                        evidence,
                        digest_of(&[d1, d2]),
                    ),
                )
            }
            (None, None, Some(trials)) => {
                let experiment = quantum::ppt_squared_experiment(*trials, common.seed, tol)?;
                let mut evidence = vec![
                    Evidence::scalar("trials", experiment.trials as f64),
                    Evidence::scalar("eb_yes", experiment.eb_yes as f64),
                    Evidence::scalar("eb_undetermined", experiment.eb_undetermined as f64),
                    Evidence::scalar("eb_no", experiment.eb_no as f64),
                ];
                for ce in &experiment.counterexamples {
                    evidence.push(Evidence::text(
                        format!("counterexample_trial_{}", ce.trial),
                        serde_json::to_string(ce)?,
                    ));
                }
                finish(
                    common,
                    VerificationReport::new(
                        "ppt-squared-probe",
                        Verdict::from_bool(experiment.eb_no == 0),
                        evidence,
                        digest_of(&(trials, common.seed)),
                    ),
                )
            }
            _ => anyhow::bail!("pass either --f1 with --f2, or --trials"),
        },
        Command::VerifyCorpus => {
            let run = corpus::verify_corpus(common.seed, tol);
            let timestamp = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let wrapper = serde_json::json!({
                "timestamp": timestamp,
                "seed": run.seed,
                "overall": if run.passed { "pass" } else { "fail" },
                "checks": run.checks,
            });
            emit(common, &wrapper)?;
            Ok(if run.passed { 0 } else { 1 })
        }
    }
}
