use std::f64::consts::PI;
use std::io::BufReader;

use narrow_escape::asymptotics::{
    mean_arrival_time, mfpt_circular, mfpt_composite_channel, mfpt_elliptic, mfpt_sphere_two_term,
    mfpt_squeezed, molar_to_number_density,
};
use narrow_escape::collins::{double_integral_check, norm_bound, operator_norm, solve_b0};
use narrow_escape::numerics::elliptic_k;
use narrow_escape::sim::{compare_with_theory, convergence_sweep, simulate, SimRecord};
use narrow_escape::spectral::{average_mfpt, solve_dual_series};
use narrow_escape::window::{build_ellipse_mesh, solve_window_ie, verify_constant_potential, WindowShape};
use narrow_escape::{
    AsymptoticMfpt, CollinsConfig, InitialCondition, KernelMode, MediumSpec, PlanarWindowMesh,
    SimConfig, SimGeometry, WindowEllipse,
};
use serde_json::Value;

use crate::args::*;
use crate::output::Record;
use crate::{record, CliError};

type Out = Result<Vec<Record>, CliError>;

/// Fills in defaults that depend on other parameters, so the echoed config
/// is complete.
pub fn resolve(cmd: &mut Command) -> Result<(), CliError> {
    match cmd {
        Command::Spectral(a) => {
            a.collocation.get_or_insert(4 * a.terms);
        }
        Command::Window(a) => {
            if a.mesh_in.is_none() {
                a.b.get_or_insert(a.a);
            }
        }
        Command::Simulate(SimulateArgs { run, .. }) | Command::Compare(CompareArgs { run, .. }) => {
            let g = geometry(&run.geometry)?;
            run.dt.get_or_insert(g.default_dt(run.D));
        }
        _ => {}
    }
    Ok(())
}

pub fn run(cmd: &Command) -> Out {
    match cmd {
        Command::Asym(a) => asym(a),
        Command::Sphere(a) => sphere(a),
        Command::Collins(a) => collins(a),
        Command::Spectral(a) => spectral(a),
        Command::Window(a) => window(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Compare(a) => compare(a),
        Command::Norms(a) => norms(a),
    }
}

fn need(v: Option<f64>, flag: &str, what: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::domain(format!("--{flag} is required for {what}")))
}

fn formula_record(shape: &str, m: &AsymptoticMfpt) -> Record {
    let mut r = record! { "shape" => shape, "value" => m.value, "regime" => m.regime };
    for (k, v) in &m.correction_terms {
        r.insert(format!("term_{k}"), Value::from(*v));
    }
    r
}

fn ellipse_of(a: &AsymArgs) -> Result<WindowEllipse, CliError> {
    let w = match (a.b, a.e) {
        (Some(b), None) => WindowEllipse::new(a.a, b)?,
        (None, Some(e)) => WindowEllipse::from_eccentricity(a.a, e)?,
        (None, None) => return Err(CliError::domain("give one of --b or --e")),
        (Some(_), Some(_)) => return Err(CliError::domain("--b and --e are mutually exclusive")),
    };
    Ok(w)
}

fn asym(a: &AsymArgs) -> Out {
    let rec = match a.shape {
        Shape::Arrival => {
            let molar = need(a.conc_molar, "conc-molar", "arrival")?;
            let r = mean_arrival_time(a.D, a.a, molar_to_number_density(molar))?;
            record! { "shape" => "arrival", "mean_time_s" => r.mean_time, "forward_rate_per_s" => r.forward_rate }
        }
        shape => {
            let medium = MediumSpec::new(need(a.V, "V", "this shape")?, a.D)?;
            match shape {
                Shape::Circle => formula_record("circle", &mfpt_circular(&medium, a.a)?),
                Shape::Ellipse => formula_record("ellipse", &mfpt_elliptic(&medium, &ellipse_of(a)?)?),
                Shape::Squeezed => formula_record("squeezed", &mfpt_squeezed(&medium, &ellipse_of(a)?)?),
                Shape::Channel => {
                    let l = need(a.L, "L", "channel")?;
                    formula_record("channel", &mfpt_composite_channel(medium.volume, a.D, a.a, l)?)
                }
                Shape::Arrival => unreachable!(),
            }
        }
    };
    Ok(vec![rec])
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(CliError::domain(format!("bad sweep range [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n).map(|k| lo * (r * k as f64).exp()).collect())
}

fn sphere(a: &SphereArgs) -> Out {
    log_grid(a.a_min, a.a_max, a.points)?
        .into_iter()
        .map(|cap| {
            let m = mfpt_sphere_two_term(a.R, cap, a.D)?;
            Ok(record! {
                "a" => cap,
                "a_over_R" => cap / a.R,
                "leading" => m.term("leading"),
                "bracket" => m.term("bracket"),
                "two_term" => m.value,
            })
        })
        .collect()
}

fn collins_config(r: f64, eps: f64, nquad: usize, kernel: Kernel) -> CollinsConfig {
    let mode = match kernel {
        Kernel::Full => KernelMode::Full,
        Kernel::Zero => KernelMode::Zero,
    };
    CollinsConfig::new(r, eps).with_quadrature(nquad).with_kernel(mode)
}

fn collins(a: &CollinsArgs) -> Out {
    let cfg = collins_config(a.R, a.eps, a.nquad, a.kernel);
    let b = solve_b0(&cfg)?;
    let log_term = a.eps * (1.0 / a.eps).ln();
    let rel = b.relative_correction(a.R, a.eps);
    let mut r = record! {
        "b0" => b.b0,
        "leading" => b.leading,
        "correction_factor" => b.correction_factor,
        "c_factor" => b.c_factor,
        "mfpt_center" => b.mfpt_center,
        "mfpt_average" => b.b0 + a.R * a.R / 15.0,
        "relative_correction" => rel,
        "ratio_to_eps_log" => rel / log_term,
        "extrapolated" => b.extrapolated,
        "operator_norm" => operator_norm(&cfg)?,
        "norm_bound" => norm_bound(a.eps),
    };
    let (di, di_ratio) = match double_integral_check(a.eps) {
        Ok(rep) => (Some(rep.integral), Some(rep.ratio)),
        Err(e) if e.is_domain() => (None, None),
        Err(e) => return Err(e.into()),
    };
    r.insert("double_integral".into(), serde_json::json!(di));
    r.insert("double_integral_ratio".into(), serde_json::json!(di_ratio));
    Ok(vec![r])
}

fn spectral(a: &SpectralArgs) -> Out {
    let m = a.collocation.unwrap_or(4 * a.terms);
    let s = solve_dual_series(a.R, a.eps, a.terms, m)?;
    let av = average_mfpt(&s)?;
    Ok(vec![record! {
        "a0" => s.a0(),
        "terms" => s.terms(),
        "residual_dirichlet" => s.residual_dirichlet,
        "residual_neumann" => s.residual_neumann,
        "condition" => s.condition,
        "mfpt_center" => av.center,
        "mfpt_average" => av.analytic,
        "mfpt_average_quadrature" => av.quadrature,
    }])
}

fn window(a: &WindowArgs) -> Out {
    let mesh = match &a.mesh_in {
        Some(p) => {
            let f = std::fs::File::open(p).map_err(CliError::io)?;
            PlanarWindowMesh::read_text(BufReader::new(f))?
        }
        None => build_ellipse_mesh(a.a, a.b.unwrap_or(a.a), a.n)?,
    };
    if let Some(p) = &a.mesh_out {
        mesh.write_text(std::fs::File::create(p).map_err(CliError::io)?)?;
    }
    let sol = solve_window_ie(&mesh, a.V, a.D)?;
    let mut r = record! {
        "elements" => mesh.len(),
        "total_area" => mesh.total_area(),
        "c0" => sol.c0,
        "total_flux" => sol.total_flux,
        "iterations" => sol.iterations,
        "relative_residual" => sol.relative_residual,
    };
    if let WindowShape::Ellipse { a: sa, b: sb } = mesh.shape {
        let (major, minor) = (sa.max(sb), sa.min(sb));
        let e = (1.0 - (minor / major).powi(2)).sqrt();
        let oracle = a.V * elliptic_k(e)? / (2.0 * PI * a.D * major);
        let pot = verify_constant_potential(major, minor, a.V, a.D, a.check_points, a.check_order)?;
        r.insert("c0_oracle".into(), oracle.into());
        r.insert("c0_rel_error".into(), ((sol.c0 - oracle) / oracle).into());
        r.insert("potential_max_rel_deviation".into(), pot.max_rel_deviation.into());
    }
    Ok(vec![r])
}

pub fn geometry(g: &GeometryArgs) -> Result<SimGeometry, CliError> {
    let geom = match g.geometry {
        GeometryKind::Ball => SimGeometry::BallWithCap {
            radius: need(g.R, "R", "ball")?,
            eps: need(g.eps, "eps", "ball")?,
        },
        GeometryKind::Cylinder => SimGeometry::CylinderAxial {
            length: need(g.L, "L", "cylinder")?,
            radius: need(g.radius, "radius", "cylinder")?,
        },
        GeometryKind::Box => SimGeometry::BoxWithEllipticWindow {
            lx: need(g.lx, "lx", "box")?,
            ly: need(g.ly, "ly", "box")?,
            lz: need(g.lz, "lz", "box")?,
            a: need(g.a, "a", "box")?,
            b: need(g.b, "b", "box")?,
        },
    };
    geom.validate()?;
    Ok(geom)
}

fn initial(start: &str) -> Result<InitialCondition, CliError> {
    if start.eq_ignore_ascii_case("uniform") {
        return Ok(InitialCondition::Uniform);
    }
    let parts: Vec<f64> = start
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::domain(format!("--start {start:?}: {e}")))?;
    match parts[..] {
        [x, y, z] => Ok(InitialCondition::Fixed([x, y, z])),
        _ => Err(CliError::domain(format!("--start needs `uniform` or x,y,z, got {start:?}"))),
    }
}

fn sim_config(r: &RunArgs) -> Result<SimConfig, CliError> {
    let mut cfg = SimConfig::new(geometry(&r.geometry)?, r.D, r.paths, r.seed)
        .with_initial(initial(&r.start)?)
        .with_max_steps(r.max_steps);
    if let Some(dt) = r.dt {
        cfg = cfg.with_dt(dt);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn to_record<T: serde::Serialize>(v: &T) -> Record {
    match serde_json::to_value(v).expect("plain data serializes") {
        Value::Object(m) => m,
        _ => unreachable!("records are structs"),
    }
}

fn simulate_cmd(a: &SimulateArgs) -> Out {
    let cfg = sim_config(&a.run)?;
    match &a.sweep {
        None => {
            let res = simulate(&cfg)?;
            if res.unreliable {
                log::warn!("{} of {} paths censored; mean is unreliable", res.n_censored, cfg.n_paths);
            }
            Ok(vec![to_record(&SimRecord::new(&cfg, &res))])
        }
        Some(levels) => {
            let rep = convergence_sweep(&cfg, levels)?;
            let mut rows: Vec<Record> = rep
                .levels
                .iter()
                .map(|l| record! { "dt" => l.dt, "mean" => l.mean, "stderr" => l.stderr, "n_censored" => l.n_censored })
                .collect();
            rows.push(record! {
                "dt" => 0.0,
                "mean" => rep.extrapolated,
                "stderr" => rep.extrapolated_stderr,
                "n_censored" => Value::Null,
            });
            Ok(rows)
        }
    }
}

fn compare(a: &CompareArgs) -> Out {
    let cfg = sim_config(&a.run)?;
    let table = compare_with_theory(&cfg)?;
    let mc = table.mc.mean;
    let gap = |v: f64| (mc - v) / v;
    let mut rows = vec![record! {
        "method" => "mc",
        "value" => mc,
        "stderr" => table.mc.stderr,
        "rel_gap" => 0.0,
    }];
    for r in &table.rows {
        rows.push(record! { "method" => r.label, "value" => r.value, "stderr" => Value::Null, "rel_gap" => r.rel_gap });
    }
    match cfg.geometry {
        SimGeometry::BallWithCap { radius, eps } => {
            let shift = match cfg.initial {
                InitialCondition::Uniform => Some(radius * radius / 15.0),
                InitialCondition::Fixed(p) if p.iter().all(|c| c.abs() < 1e-12) => Some(radius * radius / 6.0),
                InitialCondition::Fixed(_) => None,
            };
            if let Some(shift) = shift {
                let s = solve_dual_series(radius, eps, narrow_escape::spectral::DEFAULT_TERMS, 4 * narrow_escape::spectral::DEFAULT_TERMS)?;
                let v = (s.a0() + shift) / cfg.diffusion;
                rows.push(record! { "method" => "spectral", "value" => v, "stderr" => Value::Null, "rel_gap" => gap(v) });
            }
        }
        SimGeometry::BoxWithEllipticWindow { a: wa, b: wb, .. } => {
            let mesh = build_ellipse_mesh(wa.max(wb), wa.min(wb), a.mesh_n)?;
            let v = solve_window_ie(&mesh, cfg.geometry.volume(), cfg.diffusion)?.c0;
            rows.push(record! { "method" => "window-ie", "value" => v, "stderr" => Value::Null, "rel_gap" => gap(v) });
        }
        SimGeometry::CylinderAxial { .. } => {}
    }
    Ok(rows)
}

fn norms(a: &NormsArgs) -> Out {
    log_grid(a.eps_min, a.eps_max, a.points)?
        .into_iter()
        .map(|eps| {
            let n = operator_norm(&collins_config(a.R, eps, a.nquad, Kernel::Full))?;
            let bound = norm_bound(eps);
            Ok(record! {
                "eps" => eps,
                "operator_norm" => n,
                "bound" => bound,
                "ratio" => n / bound,
                "bound_holds" => n <= bound,
            })
        })
        .collect()
}
