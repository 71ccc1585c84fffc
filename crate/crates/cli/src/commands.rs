use std::path::Path;
use std::sync::Arc;

use nsac_core::geometry::{
    support_radius, verify_orthogonality_asymptotics, Curve, ModalBump, OrthogonalFamily, TubePerturbation,
};
use nsac_core::io::{load_config, MobilityConfig, StudyConfig, Tolerances};
use nsac_core::matched_ode::{solve_linearized_ac, solve_weighted, RhsSample};
use nsac_core::nsac::{self, SimConfig};
use nsac_core::profile::{DEFAULT_L_RHO, DEFAULT_N};
use nsac_core::spectral::spectral_gap_report;
use nsac_core::study::{convergence_study, mobility_comparison};
use nsac_core::surface_pde::{kappa_scaling_report, solve_surface_pde, SurfPdeProblem};
use nsac_core::{Blend, DoubleWell, Profile, Result, ViscosityModel};
use serde_json::{json, Value};

use crate::{Command, OdeCase, PotentialArg};

pub struct Outcome {
    pub name: &'static str,
    /// Effective configuration, hashed into the manifest.
    pub config: Value,
    pub files: Vec<String>,
    /// Set when a sweep stopped early on a numerical failure.
    pub failure: Option<String>,
}

fn check(label: &str, ok: bool) {
    println!("check {label}: {}", if ok { "ok" } else { "FAILED" });
}

fn write(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    files.push(name.to_string());
    Ok(())
}

fn max_dev(a: impl Iterator<Item = f64>) -> f64 {
    a.map(f64::abs).fold(0.0, f64::max)
}

pub fn run(command: &Command, dir: &Path, tol: &Tolerances) -> Result<Outcome> {
    let mut files = Vec::new();
    let (name, config, failure) = match command {
        Command::Profile {
            potential,
            a,
            b,
            l_rho,
            n,
        } => {
            let well = match potential {
                PotentialArg::Quartic => DoubleWell::Quartic,
                PotentialArg::Sextic => DoubleWell::sextic(*a, *b)?,
            };
            let p = Profile::compute(&well, *l_rho, *n)?;
            write(dir, "profile.csv", &p.to_csv()?, &mut files)?;
            println!("sigma = {:.10}", p.sigma());
            println!("alpha = {:.10}", p.alpha());
            println!(
                "newton iterations = {}, residual = {:.3e}",
                p.newton_iterations(),
                p.residual()
            );
            if matches!(potential, PotentialArg::Quartic) {
                let err = max_dev(p.rho().iter().zip(p.theta()).map(|(r, t)| t - (r / 2.0).tanh()));
                println!("max |theta - tanh(rho/2)| = {err:.3e}");
                check("profile", err <= tol.get("profile.max_error"));
                check("sigma", (p.sigma() - 2.0 / 3.0).abs() <= tol.get("profile.sigma"));
            }
            (
                "profile",
                json!({"potential": well_json(&well), "l_rho": l_rho, "n": n}),
                None,
            )
        }
        Command::Ode { case, n } => {
            let p = Profile::compute(&DoubleWell::Quartic, 15.0, *n)?;
            let case_name = match case {
                OdeCase::ThetaPp => {
                    let sol = solve_linearized_ac(&RhsSample::new(p.theta_pp().to_vec()), &p)?;
                    let err = max_dev(
                        p.rho()
                            .iter()
                            .zip(p.theta_p())
                            .zip(&sol.w)
                            .map(|((r, tp), w)| w - r * tp / 2.0),
                    );
                    write(dir, "ode.csv", &sol.to_csv(&p)?, &mut files)?;
                    println!("max |w - rho theta0'/2| = {err:.3e}");
                    check("ode", err <= tol.get("ode.max_error"));
                    "theta-pp"
                }
                OdeCase::ThetaP => {
                    // rejected by the solvability check
                    solve_linearized_ac(&RhsSample::new(p.theta_p().to_vec()), &p)?;
                    "theta-p"
                }
                OdeCase::Weighted => {
                    let m = ViscosityModel::new(2.0, 1.0)?;
                    let eta = Blend;
                    let b = RhsSample::from_fn(&p, |r| {
                        let (t, tp) = p.eval_with_slope(r);
                        m.derivative(t) * tp * eta.eta_p(r) + m.eval(t) * eta.eta_pp(r)
                    });
                    let sol = solve_weighted(&b, &m, &p)?;
                    let err = max_dev(p.rho().iter().zip(&sol.w).map(|(&r, w)| w - (eta.eta(r) - 0.5)));
                    write(dir, "ode.csv", &sol.to_csv(&p)?, &mut files)?;
                    println!("max |w - (eta - 1/2)| = {err:.3e}");
                    check("ode", err <= tol.get("ode.max_error"));
                    "weighted"
                }
            };
            ("ode", json!({"case": case_name, "n": n}), None)
        }
        Command::Spectrum { eps, half_width, n } => {
            let p = Profile::quartic();
            let c_l = -tol.get("spectrum.lambda0_low");
            let rep = spectral_gap_report(eps, *half_width, *n, c_l, &p)?;
            write(dir, "spectrum.csv", &rep.to_csv()?, &mut files)?;
            for r in &rep.rows {
                println!(
                    "eps = {}: lambda0 = {:.6e}, lambda1 = {:.6}, eps^2 lambda1 = {:.6}",
                    r.eps, r.lambda0, r.lambda1, r.eps2_lambda1
                );
                let l0 = r.eps * r.eps * r.lambda0;
                check(
                    &format!("lambda0 band at eps = {}", r.eps),
                    l0 >= tol.get("spectrum.lambda0_low") && l0 <= tol.get("spectrum.lambda0_high"),
                );
                check(
                    &format!("lambda1 at eps = {}", r.eps),
                    (r.eps2_lambda1 - 0.75).abs() <= tol.get("spectrum.lambda1"),
                );
            }
            ("spectrum", json!({"eps": eps, "half_width": half_width, "n": n}), None)
        }
        Command::CoordsCheck { eps, amplitude, mode } => {
            let curve = Curve::ellipse([0.0, 0.0], 0.3, 0.25, 256)?;
            let d: Arc<dyn TubePerturbation> = Arc::new(ModalBump {
                amplitude: *amplitude,
                width: support_radius(curve.delta()),
                mode: *mode,
                phase: 0.3,
            });
            let family = OrthogonalFamily::new(&curve, d, 61)?;
            let rep = verify_orthogonality_asymptotics(eps, &family)?;
            write(dir, "orthogonality.csv", &rep.to_csv()?, &mut files)?;
            match rep.fit {
                Some(f) => println!("orthogonality defect order = {:.3}", f.slope),
                None => println!("orthogonality defect at round-off for every eps"),
            }
            check(
                "orthogonality order",
                rep.fit.is_none_or(|f| f.slope >= tol.get("coords.min_order")),
            );
            let mid = eps[eps.len() / 2];
            let coords = family.coords(mid, 0.5)?;
            write(dir, "coords.csv", &coords.report_csv()?, &mut files)?;
            let delta = curve.delta();
            let (mut jac, mut ident) = (0.0f64, 0.0f64);
            for &r in &[-delta, 0.0, 0.5 * delta] {
                for &s in &[0.1, 2.0, 5.0] {
                    jac = jac.max(coords.jacobian_defect(r, s)?);
                    ident = ident.max(coords.identity_residual(r, s)?);
                }
            }
            let round_trip = coords.round_trip_defect()?;
            println!("eps = {mid}: round trip {round_trip:.3e}, jacobian {jac:.3e}, identity {ident:.3e}");
            check("round trip", round_trip <= tol.get("coords.round_trip"));
            check("jacobian", jac <= tol.get("coords.jacobian"));
            check("identity", ident <= tol.get("coords.identity"));
            (
                "coords-check",
                json!({"eps": eps, "amplitude": amplitude, "mode": mode}),
                None,
            )
        }
        Command::Surfpde { n, dt, t_end, kappa } => {
            let base = SurfPdeProblem::constant_coefficient(1.0, *t_end, *n, *dt);
            let rep = kappa_scaling_report(&base, kappa)?;
            write(dir, "surfpde.csv", &rep.to_csv()?, &mut files)?;
            let mut exact = 0.0f64;
            for &k in kappa {
                let sol = solve_surface_pde(&SurfPdeProblem::constant_coefficient(k, *t_end, *n, *dt))?;
                let t = sol.times.last().copied().unwrap_or(*t_end);
                exact = exact.max(max_dev(
                    sol.s
                        .iter()
                        .zip(sol.final_state())
                        .map(|(s, h)| h - (-k * t).exp() * (s - t).sin()),
                ));
            }
            println!("exact-solution error = {exact:.3e}");
            check("exact solution", exact <= tol.get("surfpde.exact"));
            for (label, f) in [("energy estimate", rep.est27), ("H2 estimate", rep.est28)] {
                println!("{label}: spread {:.3}, slope {:.3}", f.spread, f.slope);
                check(
                    label,
                    f.spread <= tol.get("surfpde.spread") && f.slope.abs() <= tol.get("surfpde.slope_band"),
                );
            }
            (
                "surfpde",
                json!({"n": n, "dt": dt, "t_end": t_end, "kappa": kappa}),
                None,
            )
        }
        Command::Simulate { config } => {
            let cfg: SimConfig = load_config(config)?;
            let profile = profile_for(&cfg.potential)?;
            let out = nsac::run(&cfg, &profile)?;
            files.extend(out.write(dir)?);
            let last = out.diagnostics.last().expect("at least the initial row");
            println!(
                "t = {:.6}, steps = {}, E = {:.6e}, radius = {:.6}",
                last.t, last.step, last.energy, last.radius
            );
            println!(
                "max divergence = {:.3e}, energy excess = {:.3e}",
                out.max_divergence(),
                out.energy_excess()
            );
            check("divergence", out.max_divergence() <= tol.get("nsac.divergence"));
            check("energy", out.energy_excess() <= tol.get("nsac.energy"));
            ("simulate", serde_json::to_value(&cfg)?, None)
        }
        Command::Study { config } => {
            let cfg: StudyConfig = load_config(config)?;
            let rep = convergence_study(cfg.alpha, &cfg.eps_list, &cfg.scenario, &Profile::quartic())?;
            write(dir, "study.csv", &rep.to_csv()?, &mut files)?;
            write(dir, "study.json", &rep.to_json()?, &mut files)?;
            for r in &rep.records {
                println!(
                    "eps = {}: {} cells, {} steps, corrected {:.4e}, transport {:.4e}",
                    r.eps, r.cells, r.steps, r.corrected.linf_l2, r.transport.linf_l2
                );
            }
            if let Some(f) = rep.fit("linf_l2", "corrected") {
                println!("corrected order = {:.3}", f.slope);
                check("corrected order", f.slope >= tol.get("study.corrected_order"));
            }
            if let Some(f) = rep.fit("linf_l2", "transport") {
                println!("transport order = {:.3}", f.slope);
                check("transport order", f.slope <= tol.get("study.transport_order"));
            }
            ("study", serde_json::to_value(&cfg)?, rep.failure.clone())
        }
        Command::Mobility { config } => {
            let cfg: MobilityConfig = load_config(config)?;
            let table = mobility_comparison(cfg.eps, &cfg.alpha_list, &cfg.scenario, &Profile::quartic())?;
            write(dir, "mobility.csv", &table.to_csv()?, &mut files)?;
            for r in &table.rows {
                println!(
                    "alpha = {}: d(R^2)/dt = {:.6e}, predicted {:.6e}, relative error {:.4}",
                    r.alpha, r.measured, r.predicted, r.relative_error
                );
                let limit = if r.alpha == 1.0 {
                    tol.get("mobility.relative_alpha1")
                } else {
                    tol.get("mobility.relative")
                };
                check(&format!("drift at alpha = {}", r.alpha), r.relative_error <= limit);
            }
            if let Some(q) = table.ratio_check() {
                println!("rate ratio / eps^-1/2 = {q:.4}");
                check("ratio", (q - 1.0).abs() <= tol.get("mobility.ratio"));
            }
            ("mobility", serde_json::to_value(&cfg)?, None)
        }
    };
    Ok(Outcome {
        name,
        config,
        files,
        failure,
    })
}

fn well_json(well: &DoubleWell) -> Value {
    serde_json::to_value(well).unwrap_or(Value::Null)
}

fn profile_for(well: &DoubleWell) -> Result<Profile> {
    match well {
        DoubleWell::Quartic => Ok(Profile::quartic()),
        other => Profile::compute(other, DEFAULT_L_RHO, DEFAULT_N),
    }
}
