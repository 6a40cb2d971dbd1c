//! Intermediate representation of a parsed pulse-sequence script.

use crate::error::Result;
use crate::pulse::Axis;
use crate::qudit::Spin;
use crate::spin_system::{SpinSystem, Transition, DEFAULT_SPLITTING_HZ};

/// 1-based source location.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// How the quadrupolar coupling was declared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// Adjacent-line splitting in Hz (6Λ).
    Splitting(f64),
    /// Λ in Hz.
    Lambda(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDecl {
    pub spin: Spin,
    pub coupling: Option<Coupling>,
    pub offset_hz: f64,
}

impl Default for SystemDecl {
    fn default() -> Self {
        Self {
            spin: Spin::THREE_HALVES,
            coupling: None,
            offset_hz: 0.0,
        }
    }
}

impl SystemDecl {
    pub fn lambda_hz(&self) -> Option<f64> {
        self.coupling.map(|c| match c {
            Coupling::Splitting(s) => s / 6.0,
            Coupling::Lambda(l) => l,
        })
    }

    /// The declared system; the default splitting applies when none is given.
    pub fn spin_system(&self) -> SpinSystem {
        match self.lambda_hz() {
            Some(l) => SpinSystem::new(self.spin, l, self.offset_hz),
            None => SpinSystem::from_splitting(self.spin, DEFAULT_SPLITTING_HZ, self.offset_hz),
        }
    }
}

/// A pair of level labels, in the order written.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionRef {
    pub first: String,
    pub second: String,
}

impl TransitionRef {
    pub fn new(first: impl Into<String>, second: impl Into<String>) -> Self {
        Self {
            first: first.into(),
            second: second.into(),
        }
    }

    pub fn resolve(&self, sys: &SpinSystem) -> Result<Transition> {
        sys.observable_transition(&self.first, &self.second)
    }
}

impl std::fmt::Display for TransitionRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.first, self.second)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    HardPulse {
        axis: Axis,
        angle: f64,
    },
    SelPulse {
        transition: TransitionRef,
        axis: Axis,
        angle: f64,
        /// Gaussian duration in seconds; ideal when absent.
        shape: Option<f64>,
    },
    /// Selective z-rotation: the first named level gets e^{-iφ}, the second e^{+iφ}.
    ZPulse {
        transition: TransitionRef,
        angle: f64,
    },
    QuadDelay {
        tau_s: f64,
        /// Written as `pi/(12*lambda)`.
        symbolic: bool,
    },
    Refocus {
        tau_s: f64,
    },
    Gradient,
    Acquire {
        points: usize,
        dwell_s: f64,
    },
}

impl Event {
    pub fn keyword(&self) -> &'static str {
        match self {
            Event::HardPulse { .. } | Event::SelPulse { .. } => "pulse",
            Event::ZPulse { .. } => "zpulse",
            Event::QuadDelay { .. } => "delay",
            Event::Refocus { .. } => "refocus",
            Event::Gradient => "gradient",
            Event::Acquire { .. } => "acquire",
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Event::Gradient | Event::Acquire { .. })
    }
}

#[derive(Debug, Clone)]
pub struct SpannedEvent {
    pub event: Event,
    pub span: Span,
}

impl PartialEq for SpannedEvent {
    fn eq(&self, other: &Self) -> bool {
        self.event == other.event
    }
}

/// A validated script. Equality ignores source locations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceIr {
    pub system: SystemDecl,
    pub events: Vec<SpannedEvent>,
}

impl SequenceIr {
    pub fn new(system: SystemDecl, events: Vec<Event>) -> Self {
        Self {
            system,
            events: events
                .into_iter()
                .map(|event| SpannedEvent {
                    event,
                    span: Span::default(),
                })
                .collect(),
        }
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().map(|e| &e.event)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// IR holding only the event at `index`, with the same system.
    pub fn single(&self, index: usize) -> Self {
        Self {
            system: self.system.clone(),
            events: vec![self.events[index].clone()],
        }
    }
}
