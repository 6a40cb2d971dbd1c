//! Canonical text form of a sequence. Parsing the output reproduces the IR exactly.

use std::fmt::Write;

use super::ast::{Coupling, Event, SequenceIr};
use super::parse::SYMBOLIC_QUAD_DELAY;

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn print_sequence(ir: &SequenceIr) -> String {
    let mut out = String::new();
    let sys = &ir.system;
    write!(out, "system I={}", sys.spin).unwrap();
    match sys.coupling {
        Some(Coupling::Splitting(v)) => write!(out, " splitting={}Hz", num(v)).unwrap(),
        Some(Coupling::Lambda(v)) => write!(out, " lambda={}Hz", num(v)).unwrap(),
        None => {}
    }
    if sys.offset_hz != 0.0 {
        write!(out, " offset={}Hz", num(sys.offset_hz)).unwrap();
    }
    out.push('\n');
    for event in ir.events() {
        out.push_str(&print_event(event));
        out.push('\n');
    }
    out
}

pub fn print_event(event: &Event) -> String {
    match event {
        Event::HardPulse { axis, angle } => format!("pulse hard {axis} {}", num(*angle)),
        Event::SelPulse {
            transition,
            axis,
            angle,
            shape,
        } => {
            let mut s = format!("pulse sel {transition} {axis} {}", num(*angle));
            if let Some(d) = shape {
                write!(s, " gauss {}s", num(*d)).unwrap();
            }
            s
        }
        Event::ZPulse { transition, angle } => format!("zpulse {transition} {}", num(*angle)),
        Event::QuadDelay { tau_s, symbolic } => {
            if *symbolic {
                format!("delay quad {SYMBOLIC_QUAD_DELAY}")
            } else {
                format!("delay quad {}s", num(*tau_s))
            }
        }
        Event::Refocus { tau_s } => format!("refocus {}s", num(*tau_s)),
        Event::Gradient => "gradient".to_string(),
        Event::Acquire { points, dwell_s } => format!("acquire {points} {}s", num(*dwell_s)),
    }
}
