//! Plain-text rendering of reports.

use crate::report::{ComplexValue, StabilityReport};
use crate::sweep::SweepReport;
use std::fmt::Write;

fn complex(z: &ComplexValue) -> String {
    if z.im == 0.0 {
        format!("{:>14.9}", z.re)
    } else {
        format!("{:>14.9} {:+.9}i", z.re, z.im)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

pub fn render_report(r: &StabilityReport) -> String {
    let mut out = String::new();
    let c = &r.case;
    let _ = writeln!(out, "case          {} (n = {}, group {} of order {})", c.name, c.n, c.symmetry_group, c.group_order);
    let _ = writeln!(out, "potential     {}", c.potential_text);
    let _ = writeln!(out, "centrality    residual {:.3e} (tolerance {:.3e})", c.centrality_residual, c.centrality_tolerance);
    if let Some(w) = &r.omega {
        let _ = writeln!(out, "omega^2       {:.15}", w.computed.value);
        if let Some(rf) = &w.reference {
            let _ = writeln!(out, "  reference   {:.15}  [{}]  agrees: {}", rf.value, rf.expression, yes_no(rf.agrees));
        }
    }
    if let Some(h) = &r.hessian {
        let _ = writeln!(out, "\nHessian eigenvalues by isotypic component");
        for comp in &h.components {
            if comp.multiplicity == 0 {
                continue;
            }
            let vals: Vec<String> = comp.eigenvalues.iter().map(|v| format!("{v:.10}")).collect();
            let _ = writeln!(out, "  {:<4} dim {} x{}  {}", comp.irrep, comp.degree, comp.multiplicity, vals.join(", "));
        }
        let _ = writeln!(out, "  trace equations vs direct: {:.2e}", h.trace_vs_direct);
        for e in &h.entries {
            let _ = writeln!(
                out,
                "  H[{},{}] = {:.12}  reference {:.12}  agrees: {}",
                e.row,
                e.col,
                e.computed,
                e.reference.value,
                yes_no(e.reference.agrees)
            );
        }
        if let Some(l) = &h.reference_eigenvalues {
            let _ = writeln!(out, "  reference eigenvalue list agrees: {}", yes_no(l.agrees));
        }
    }
    if let Some(d) = &r.decomposition {
        let _ = writeln!(out, "\nJ-compatible decomposition ({})", d.group);
        for p in &d.pairs {
            let _ = writeln!(out, "  pair     {:<4} lambda = ({:.10}, {:.10})", p.irrep, p.lambdas[0], p.lambdas[1]);
        }
        for p in &d.coupled {
            let _ = writeln!(
                out,
                "  coupled  {:<4} h+ = {:.10}, h- = {:.10}, kappa = {:.10}",
                p.irrep, p.h_plus, p.h_minus, p.kappa
            );
        }
        for p in &d.residual {
            let _ = writeln!(out, "  residual {:<4} dimension {}", p.irrep, p.dimension);
        }
    }
    if let Some(b) = &r.blocks {
        let _ = writeln!(out, "\nblock spectra");
        for blk in &b.blocks {
            let _ = writeln!(out, "  {:?} {}", blk.kind, blk.irrep);
            for (z, l) in blk.eigenvalues.iter().zip(&blk.labels) {
                let _ = writeln!(out, "    {}  {}", complex(z), l);
            }
        }
        if let Some(rf) = &b.reference {
            let _ = writeln!(out, "  reference block spectrum agrees with oracle: {}", yes_no(rf.agrees));
        }
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(out, "\noracle spectrum (Hamiltonian defect {:.2e})", o.hamiltonian_defect);
        for (z, l) in o.eigenvalues.iter().zip(&o.labels) {
            let _ = writeln!(out, "  {}  {}", complex(z), l);
        }
    }
    let k = &r.consistency;
    let _ = writeln!(
        out,
        "\nblocks vs oracle: {} (max distance {}, tolerance {:.1e} x {:.4})",
        if k.passed { "match" } else { "MISMATCH" },
        k.max_distance.map_or("n/a".to_string(), |d| format!("{d:.3e}")),
        k.tolerance,
        k.scale
    );
    if let Some(v) = &r.verdict {
        let _ = writeln!(
            out,
            "verdict       {}  (max Re = {:.10}, {:.4} omega; {} zero, {} imaginary, {} real, {} complex)",
            v.verdict, v.max_real_part, v.max_real_over_omega, v.zero_modes, v.imaginary_modes, v.real_modes, v.complex_modes
        );
    }
    if let Some(d) = &r.dynamics {
        let _ = writeln!(
            out,
            "dynamics      drift {:.3e} over {} periods, energy drift {:.3e}",
            d.equilibrium_drift, d.periods, d.energy_drift
        );
        if let Some(g) = &d.growth {
            let _ = writeln!(
                out,
                "  growth      measured {:.6}, predicted {:.6}, relative error {:.2e}{}",
                g.measured,
                g.predicted,
                g.relative_error,
                if g.checked { "" } else { " (not checked: slow instability)" }
            );
        }
    }
    if !r.discrepancies.is_empty() {
        let _ = writeln!(out, "\ndiscrepancies with reference values");
        for d in &r.discrepancies {
            let _ = writeln!(out, "  {}: {}", d.quantity, d.note);
        }
    }
    if let Some(t) = &r.timing {
        let _ = writeln!(out, "\ntime          {:.1} ms", t.total_ms);
    }
    out
}

pub fn render_sweep(s: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>8}  {:<30}  {:>14}  {:<16}  modes", s.parameter, "verdict", "max Re", "component");
    for row in &s.summary {
        let modes: Vec<String> = row.component_modes.iter().map(|z| complex(z).trim().to_string()).collect();
        let _ = writeln!(
            out,
            "{:>8.4}  {:<30}  {:>14}  {:<16}  {}",
            row.value,
            row.verdict.as_deref().unwrap_or("error"),
            row.max_real_part.map_or("-".to_string(), |x| format!("{x:.8}")),
            row.component_label,
            modes.join(", ")
        );
    }
    for p in s.points.iter().filter(|p| p.error.is_some()) {
        let _ = writeln!(out, "  {} = {}: {}", s.parameter, p.value, p.error.as_deref().unwrap_or_default());
    }
    out
}
