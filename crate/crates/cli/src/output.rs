//! CSV writers. Every float is written with 17 significant digits so reruns
//! can be compared byte for byte.

use std::io::{self, Write};

use containment_core::{AgentState, DiagnosticsFrame, Pose};

pub const TRAJECTORY_HEADER: &str = "t,agent,x,y,theta,phi_x,phi_y,phi_theta,rho_x,rho_y,rho_theta";
pub const DIAGNOSTICS_HEADER: &str = "t,xi_norm,big_s_norm,v1,envelope";
pub const SWEEP_HEADER: &str =
    "param,value,status,convergence_time,final_xi_norm,containment_final,envelope_violations,final_state_diff";

/// `{:.16e}`: one leading digit plus sixteen decimals.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn push_pose(line: &mut String, p: &Pose<f64>) {
    for v in p.to_array() {
        line.push(',');
        line.push_str(&fmt_f64(v));
    }
}

/// One row per agent; agents are numbered from 1 as in the scenario file.
pub fn write_states(w: &mut impl Write, t: f64, states: &[AgentState<f64>]) -> io::Result<()> {
    for (i, s) in states.iter().enumerate() {
        let mut line = format!("{},{}", fmt_f64(t), i + 1);
        push_pose(&mut line, &s.eta);
        push_pose(&mut line, &s.phi);
        push_pose(&mut line, &s.rho);
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_diagnostics(w: &mut impl Write, frame: &DiagnosticsFrame<f64>) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{}",
        fmt_f64(frame.t),
        fmt_f64(frame.xi_norm()),
        fmt_f64(frame.big_s_norm()),
        fmt_f64(frame.v1),
        fmt_f64(frame.envelope)
    )
}
