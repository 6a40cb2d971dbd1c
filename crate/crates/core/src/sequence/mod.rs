//! The `.qseq` pulse-sequence language.
//!
//! One statement per line, `#` starts a comment. Events run in the order
//! written: the first line acts on the state first.

mod ast;
mod compile;
mod parse;
mod print;

pub use ast::{Coupling, Event, SequenceIr, Span, SpannedEvent, SystemDecl, TransitionRef};
pub use compile::{
    compile_unitary, event_propagator, run_trajectory, run_trajectory_with, Trajectory,
};
pub use parse::{parse_sequence, ParseError, ParseErrorCode, SYMBOLIC_QUAD_DELAY};
pub use print::{print_event, print_sequence};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::Axis;
    use crate::qudit::{gate_fidelity_global_phase, ComplexMatrix};
    use std::f64::consts::PI;

    fn code_of(text: &str) -> ParseErrorCode {
        parse_sequence(text).unwrap_err().code
    }

    #[test]
    fn parses_symbolic_forms() {
        let ir = parse_sequence(
            "system I=3/2 splitting=16kHz  # sodium\n\
             pulse sel 10-11 -y pi/sqrt(3)\n\
             delay quad pi/(12*lambda)\n\
             zpulse 01-11 pi/2\n",
        )
        .unwrap();
        assert_eq!(ir.len(), 3);
        assert_eq!(ir.system.lambda_hz(), Some(16000.0 / 6.0));
        let events: Vec<&Event> = ir.events().collect();
        assert_eq!(
            events[0],
            &Event::SelPulse {
                transition: TransitionRef::new("10", "11"),
                axis: Axis::MinusY,
                angle: PI / 3f64.sqrt(),
                shape: None
            }
        );
        match events[1] {
            Event::QuadDelay { tau_s, symbolic } => {
                assert!(*symbolic);
                assert!((tau_s - 1.0 / (12.0 * 16000.0 / 6.0 * 2.0)).abs() < 1e-18);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(ir.events[2].span, Span { line: 4, column: 1 });
    }

    #[test]
    fn units_and_numbers() {
        let ir = parse_sequence(
            "system I=1.5 lambda=2.5kHz offset=-100Hz\n\
             refocus 1.5e-5s\n\
             refocus 20us\n\
             refocus 2ms\n\
             pulse sel 00-01 x 0.5 gauss 125us\n\
             acquire 1024 5us\n",
        )
        .unwrap();
        assert_eq!(ir.system.offset_hz, -100.0);
        let taus: Vec<f64> = ir
            .events()
            .filter_map(|e| match e {
                Event::Refocus { tau_s } => Some(*tau_s),
                _ => None,
            })
            .collect();
        for (got, want) in taus.iter().zip([1.5e-5, 20e-6, 2e-3]) {
            assert!((got - want).abs() < 1e-18, "{got} vs {want}");
        }
        assert_eq!(taus.len(), 3);
    }

    #[test]
    fn sel_z_axis_becomes_zpulse() {
        let ir = parse_sequence("system I=3/2\npulse sel 00-01 -z pi/2\n").unwrap();
        assert_eq!(
            ir.events().next().unwrap(),
            &Event::ZPulse {
                transition: TransitionRef::new("00", "01"),
                angle: -PI / 2.0
            }
        );
    }

    #[test]
    fn error_codes_and_locations() {
        let err = parse_sequence("system I=3/2\npulse sel 00-10 x 3.14\n").unwrap_err();
        assert_eq!(err.code, ParseErrorCode::ForbiddenTransition);
        assert_eq!((err.line(), err.column()), (2, 11));
        assert_eq!(
            code_of("system I=3/2\nzpulse 00-22 1\n"),
            ParseErrorCode::UnknownTransition
        );
        assert_eq!(
            code_of("system I=3/2\nwait 1s\n"),
            ParseErrorCode::UnknownKeyword
        );
        assert_eq!(
            code_of("system I=3/2\ndelay quad pi/(12*lambda)\n"),
            ParseErrorCode::UndeclaredLambda
        );
        assert_eq!(
            code_of("system I=3/2\nacquire 64 5us\nacquire 64 5us\n"),
            ParseErrorCode::DuplicateAcquire
        );
        assert_eq!(
            code_of("system I=3/2\nacquire 64 5us\ngradient\n"),
            ParseErrorCode::AcquireNotLast
        );
        assert_eq!(
            code_of("system I=3/2\nacquire 100 5us\n"),
            ParseErrorCode::InvalidValue
        );
        assert_eq!(code_of("pulse hard x 1\n"), ParseErrorCode::MissingSystem);
        assert_eq!(
            code_of("system I=3/2\npulse hard z 1\n"),
            ParseErrorCode::InvalidAxis
        );
        assert_eq!(
            code_of("system I=3/2\npulse hard x (1\n"),
            ParseErrorCode::Syntax
        );
        assert_eq!(
            code_of("system I=3/2\nrefocus 5kHz\n"),
            ParseErrorCode::Syntax
        );
        let err = parse_sequence("system I=3/2\npulse hard x 1 extra\n").unwrap_err();
        assert_eq!(
            (err.code, err.line(), err.column()),
            (ParseErrorCode::Syntax, 2, 16)
        );
    }

    #[test]
    fn print_round_trip() {
        let text = "system I=3/2 splitting=16kHz offset=250Hz\n\
                    pulse hard -y pi/2\n\
                    pulse sel 00-01 x pi/sqrt(3) gauss 125us\n\
                    zpulse 10-11 -pi/4\n\
                    delay quad pi/(12*lambda)\n\
                    delay quad 3.3us\n\
                    refocus 0.1ms\n\
                    gradient\n\
                    acquire 4096 5us\n";
        let ir = parse_sequence(text).unwrap();
        let printed = print_sequence(&ir);
        let again = parse_sequence(&printed).unwrap();
        assert_eq!(ir, again);
        assert_eq!(printed, print_sequence(&again));
    }

    #[test]
    fn empty_script_is_identity() {
        let ir = parse_sequence("system I=3/2 splitting=16kHz\n").unwrap();
        let sys = ir.system.spin_system();
        assert!(compile_unitary(&ir, &sys)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn compile_rejects_non_unitary() {
        let ir = parse_sequence("system I=3/2\ngradient\n").unwrap();
        let sys = ir.system.spin_system();
        assert!(matches!(
            compile_unitary(&ir, &sys),
            Err(crate::Error::NonUnitary("gradient"))
        ));
    }

    #[test]
    fn compositionality() {
        let ir = parse_sequence(
            "system I=3/2 splitting=16kHz\n\
             pulse hard x 0.3\n\
             zpulse 01-11 0.7\n\
             delay quad 7us\n\
             pulse sel 11-10 -y 0.9\n",
        )
        .unwrap();
        let sys = ir.system.spin_system();
        let whole = compile_unitary(&ir, &sys).unwrap();
        let parts = (0..ir.len()).fold(ComplexMatrix::identity(4), |acc, k| {
            &compile_unitary(&ir.single(k), &sys).unwrap() * &acc
        });
        assert!(whole.approx_eq(&parts, 1e-14));
        assert!((gate_fidelity_global_phase(&whole, &parts).unwrap() - 1.0).abs() < 1e-12);
    }
}
