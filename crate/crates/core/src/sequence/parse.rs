//! Line-oriented parser for `.qseq` scripts.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use super::ast::{Coupling, Event, SequenceIr, Span, SpannedEvent, SystemDecl, TransitionRef};
use crate::pulse::Axis;
use crate::qudit::Spin;
use crate::spin_system::{SpinSystem, TransitionKind};

/// The one symbolic duration the language accepts verbatim.
pub const SYMBOLIC_QUAD_DELAY: &str = "pi/(12*lambda)";

/// Machine-readable parse error category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorCode {
    Syntax,
    UnknownKeyword,
    UnknownTransition,
    ForbiddenTransition,
    InvalidAxis,
    InvalidValue,
    MissingSystem,
    DuplicateSystem,
    DuplicateAcquire,
    AcquireNotLast,
    UndeclaredLambda,
}

impl ParseErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Syntax => "syntax",
            Self::UnknownKeyword => "unknown-keyword",
            Self::UnknownTransition => "unknown-transition",
            Self::ForbiddenTransition => "forbidden-transition",
            Self::InvalidAxis => "invalid-axis",
            Self::InvalidValue => "invalid-value",
            Self::MissingSystem => "missing-system",
            Self::DuplicateSystem => "duplicate-system",
            Self::DuplicateAcquire => "duplicate-acquire",
            Self::AcquireNotLast => "acquire-not-last",
            Self::UndeclaredLambda => "undeclared-lambda",
        }
    }
}

impl fmt::Display for ParseErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}:{}: error[{code}]: {message}", span.line, span.column)]
pub struct ParseError {
    pub code: ParseErrorCode,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    fn new(code: ParseErrorCode, span: Span, message: impl Into<String>) -> Self {
        Self {
            code,
            span,
            message: message.into(),
        }
    }

    pub fn line(&self) -> usize {
        self.span.line
    }

    pub fn column(&self) -> usize {
        self.span.column
    }
}

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, Copy)]
struct Word<'a> {
    text: &'a str,
    span: Span,
}

fn split_words(line: &str, line_no: usize) -> Vec<Word<'_>> {
    let code = match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (byte, ch) in code
        .char_indices()
        .chain(std::iter::once((code.len(), ' ')))
    {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word {
                    text: &code[s..byte],
                    span: Span {
                        line: line_no,
                        column: code[..s].chars().count() + 1,
                    },
                });
            }
        } else if start.is_none() {
            start = Some(byte);
        }
    }
    out
}

/// Unit class accepted after an expression.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Units {
    None,
    Time,
    Frequency,
}

fn unit_factor(units: Units, unit: &str) -> Option<f64> {
    match (units, unit) {
        (_, "") => Some(1.0),
        (Units::Time, "s") => Some(1.0),
        (Units::Time, "ms") => Some(1e-3),
        (Units::Time, "us" | "µs") => Some(1e-6),
        (Units::Frequency, "Hz") => Some(1.0),
        (Units::Frequency, "kHz") => Some(1e3),
        (Units::Frequency, "MHz") => Some(1e6),
        _ => None,
    }
}

/// Recursive-descent evaluator for numeric expressions.
///
/// expr := term (('+' | '-') term)* ; term := unary (('*' | '/') unary)* ;
/// unary := '-' unary | '+' unary | primary ;
/// primary := number | 'pi' | 'lambda' | 'sqrt' '(' expr ')' | '(' expr ')'
struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    word: Word<'a>,
    lambda: Option<f64>,
}

impl<'a> ExprParser<'a> {
    fn new(word: Word<'a>, lambda: Option<f64>) -> Self {
        Self {
            chars: word.text.chars().collect(),
            pos: 0,
            word,
            lambda,
        }
    }

    fn span_at(&self, pos: usize) -> Span {
        Span {
            line: self.word.span.line,
            column: self.word.span.column + pos,
        }
    }

    fn err(&self, code: ParseErrorCode, message: impl Into<String>) -> ParseError {
        ParseError::new(code, self.span_at(self.pos), message)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn rest(&self) -> String {
        self.chars[self.pos..].iter().collect()
    }

    fn expr(&mut self) -> PResult<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> PResult<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> PResult<f64> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<f64> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err(ParseErrorCode::Syntax, "expected `)`"));
                }
                Ok(v)
            }
            Some(ch) if ch.is_ascii_digit() || ch == '.' => self.number(),
            Some(ch) if ch.is_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                match ident.as_str() {
                    "pi" => Ok(PI),
                    "lambda" => self.lambda.ok_or_else(|| {
                        ParseError::new(
                            ParseErrorCode::UndeclaredLambda,
                            self.span_at(start),
                            "`lambda` used but the system declares no splitting or lambda",
                        )
                    }),
                    "sqrt" => {
                        if !self.eat('(') {
                            return Err(self.err(ParseErrorCode::Syntax, "expected `(` after sqrt"));
                        }
                        let v = self.expr()?;
                        if !self.eat(')') {
                            return Err(self.err(ParseErrorCode::Syntax, "expected `)`"));
                        }
                        Ok(v.sqrt())
                    }
                    _ => {
                        self.pos = start;
                        Err(self.err(ParseErrorCode::Syntax, format!("unknown symbol `{ident}`")))
                    }
                }
            }
            Some(ch) => Err(self.err(ParseErrorCode::Syntax, format!("unexpected `{ch}`"))),
            None => Err(self.err(ParseErrorCode::Syntax, "expected a number")),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map_err(|_| {
            ParseError::new(
                ParseErrorCode::Syntax,
                self.span_at(start),
                format!("malformed number `{text}`"),
            )
        })
    }
}

fn eval(word: Word<'_>, lambda: Option<f64>, units: Units) -> PResult<f64> {
    let mut p = ExprParser::new(word, lambda);
    let v = p.expr()?;
    let unit = p.rest();
    let factor = unit_factor(units, &unit).ok_or_else(|| {
        let what = match units {
            Units::None => "no unit is allowed here",
            Units::Time => "expected a time unit (s, ms, us)",
            Units::Frequency => "expected a frequency unit (Hz, kHz, MHz)",
        };
        p.err(
            ParseErrorCode::Syntax,
            format!("unexpected `{unit}`: {what}"),
        )
    })?;
    let v = v * factor;
    if !v.is_finite() {
        return Err(ParseError::new(
            ParseErrorCode::InvalidValue,
            word.span,
            format!("`{}` is not finite", word.text),
        ));
    }
    Ok(v)
}

struct LineParser<'a> {
    words: Vec<Word<'a>>,
    pos: usize,
    end: Span,
}

impl<'a> LineParser<'a> {
    fn next(&mut self, what: &str) -> PResult<Word<'a>> {
        let w = self.words.get(self.pos).copied().ok_or_else(|| {
            ParseError::new(ParseErrorCode::Syntax, self.end, format!("expected {what}"))
        })?;
        self.pos += 1;
        Ok(w)
    }

    fn peek(&self) -> Option<Word<'a>> {
        self.words.get(self.pos).copied()
    }

    fn finish(&self) -> PResult<()> {
        match self.peek() {
            Some(w) => Err(ParseError::new(
                ParseErrorCode::Syntax,
                w.span,
                format!("unexpected trailing `{}`", w.text),
            )),
            None => Ok(()),
        }
    }
}

fn parse_axis(word: Word<'_>, allow_z: bool) -> PResult<Axis> {
    let axis: Axis = word.text.parse().map_err(|_| {
        ParseError::new(
            ParseErrorCode::InvalidAxis,
            word.span,
            format!("unknown axis `{}`", word.text),
        )
    })?;
    if !allow_z && !axis.is_transverse() {
        return Err(ParseError::new(
            ParseErrorCode::InvalidAxis,
            word.span,
            "hard pulses must be about a transverse axis",
        ));
    }
    Ok(axis)
}

fn parse_transition(word: Word<'_>, sys: &SpinSystem) -> PResult<TransitionRef> {
    let (a, b) = word.text.split_once('-').ok_or_else(|| {
        ParseError::new(
            ParseErrorCode::Syntax,
            word.span,
            format!("expected a transition like `10-11`, got `{}`", word.text),
        )
    })?;
    let t = sys.transition(a, b).map_err(|_| {
        ParseError::new(
            ParseErrorCode::UnknownTransition,
            word.span,
            format!(
                "unknown transition `{}` (levels are {})",
                word.text,
                sys.labels().join(", ")
            ),
        )
    })?;
    if t.kind == TransitionKind::Forbidden {
        return Err(ParseError::new(
            ParseErrorCode::ForbiddenTransition,
            word.span,
            format!(
                "transition `{}` has |dm| = {} and cannot be driven",
                word.text, t.delta_m
            ),
        ));
    }
    Ok(TransitionRef::new(a, b))
}

fn non_negative(v: f64, word: Word<'_>, what: &str) -> PResult<f64> {
    if v < 0.0 {
        return Err(ParseError::new(
            ParseErrorCode::InvalidValue,
            word.span,
            format!("{what} must be non-negative, got {v}"),
        ));
    }
    Ok(v)
}

fn parse_system(lp: &mut LineParser<'_>) -> PResult<SystemDecl> {
    let mut decl = SystemDecl::default();
    let mut seen_spin = false;
    while let Some(w) = lp.peek() {
        lp.pos += 1;
        let (key, value) = w.text.split_once('=').ok_or_else(|| {
            ParseError::new(
                ParseErrorCode::Syntax,
                w.span,
                format!("expected key=value, got `{}`", w.text),
            )
        })?;
        let vword = Word {
            text: value,
            span: Span {
                line: w.span.line,
                column: w.span.column + key.chars().count() + 1,
            },
        };
        match key {
            "I" => {
                let v = eval(vword, None, Units::None)?;
                decl.spin = Spin::new(v).map_err(|e| {
                    ParseError::new(ParseErrorCode::InvalidValue, vword.span, e.to_string())
                })?;
                seen_spin = true;
            }
            "splitting" | "lambda" => {
                if decl.coupling.is_some() {
                    return Err(ParseError::new(
                        ParseErrorCode::Syntax,
                        w.span,
                        "declare either splitting or lambda, once",
                    ));
                }
                let v = eval(vword, None, Units::Frequency)?;
                decl.coupling = Some(if key == "lambda" {
                    Coupling::Lambda(v)
                } else {
                    Coupling::Splitting(v)
                });
            }
            "offset" => decl.offset_hz = eval(vword, None, Units::Frequency)?,
            _ => {
                return Err(ParseError::new(
                    ParseErrorCode::UnknownKeyword,
                    w.span,
                    format!("unknown system parameter `{key}`"),
                ))
            }
        }
    }
    if !seen_spin {
        return Err(ParseError::new(
            ParseErrorCode::Syntax,
            lp.end,
            "system line must give I=<spin>",
        ));
    }
    Ok(decl)
}

fn parse_event(
    keyword: Word<'_>,
    lp: &mut LineParser<'_>,
    decl: &SystemDecl,
    sys: &SpinSystem,
) -> PResult<Event> {
    let lambda = decl.lambda_hz().map(|l| 2.0 * PI * l);
    let event = match keyword.text {
        "pulse" => {
            let scope = lp.next("`hard` or `sel`")?;
            match scope.text {
                "hard" => {
                    let axis = parse_axis(lp.next("an axis")?, false)?;
                    let angle = eval(lp.next("an angle")?, lambda, Units::None)?;
                    Event::HardPulse { axis, angle }
                }
                "sel" => {
                    let transition = parse_transition(lp.next("a transition")?, sys)?;
                    let axis = parse_axis(lp.next("an axis")?, true)?;
                    let angle = eval(lp.next("an angle")?, lambda, Units::None)?;
                    let shape = match lp.peek() {
                        Some(w) if w.text == "gauss" => {
                            lp.pos += 1;
                            let dw = lp.next("a pulse duration")?;
                            let d = eval(dw, lambda, Units::Time)?;
                            if d <= 0.0 {
                                return Err(ParseError::new(
                                    ParseErrorCode::InvalidValue,
                                    dw.span,
                                    "shaped pulse duration must be positive",
                                ));
                            }
                            Some(d)
                        }
                        _ => None,
                    };
                    if axis.is_transverse() {
                        Event::SelPulse {
                            transition,
                            axis,
                            angle,
                            shape,
                        }
                    } else if shape.is_some() {
                        return Err(ParseError::new(
                            ParseErrorCode::InvalidAxis,
                            scope.span,
                            "selective z-pulses are composite and cannot be shaped",
                        ));
                    } else {
                        Event::ZPulse {
                            transition,
                            angle: axis.generator_sign() * angle,
                        }
                    }
                }
                other => {
                    return Err(ParseError::new(
                        ParseErrorCode::UnknownKeyword,
                        scope.span,
                        format!("expected `hard` or `sel`, got `{other}`"),
                    ))
                }
            }
        }
        "zpulse" => {
            let transition = parse_transition(lp.next("a transition")?, sys)?;
            let angle = eval(lp.next("an angle")?, lambda, Units::None)?;
            Event::ZPulse { transition, angle }
        }
        "delay" => {
            let kind = lp.next("`quad`")?;
            if kind.text != "quad" {
                return Err(ParseError::new(
                    ParseErrorCode::UnknownKeyword,
                    kind.span,
                    format!("unknown delay kind `{}`", kind.text),
                ));
            }
            let dw = lp.next("a duration")?;
            let tau_s = non_negative(eval(dw, lambda, Units::Time)?, dw, "delay")?;
            Event::QuadDelay {
                tau_s,
                symbolic: dw.text == SYMBOLIC_QUAD_DELAY,
            }
        }
        "refocus" => {
            let dw = lp.next("a duration")?;
            Event::Refocus {
                tau_s: non_negative(eval(dw, lambda, Units::Time)?, dw, "refocus time")?,
            }
        }
        "gradient" => Event::Gradient,
        "acquire" => {
            let pw = lp.next("a point count")?;
            let points: usize = pw.text.parse().map_err(|_| {
                ParseError::new(
                    ParseErrorCode::InvalidValue,
                    pw.span,
                    format!("`{}` is not a point count", pw.text),
                )
            })?;
            if points < 2 || !points.is_power_of_two() {
                return Err(ParseError::new(
                    ParseErrorCode::InvalidValue,
                    pw.span,
                    format!("point count must be a power of two >= 2, got {points}"),
                ));
            }
            let dw = lp.next("a dwell time")?;
            let dwell_s = eval(dw, lambda, Units::Time)?;
            if dwell_s <= 0.0 {
                return Err(ParseError::new(
                    ParseErrorCode::InvalidValue,
                    dw.span,
                    "dwell must be positive",
                ));
            }
            Event::Acquire { points, dwell_s }
        }
        other => {
            return Err(ParseError::new(
                ParseErrorCode::UnknownKeyword,
                keyword.span,
                format!("unknown keyword `{other}`"),
            ))
        }
    };
    lp.finish()?;
    Ok(event)
}

/// Parses and validates a script.
pub fn parse_sequence(text: &str) -> Result<SequenceIr, ParseError> {
    let mut decl: Option<(SystemDecl, SpinSystem)> = None;
    let mut events: Vec<SpannedEvent> = Vec::new();
    let mut acquire_at: Option<Span> = None;
    let mut last_line = 0;
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        last_line = line_no;
        let words = split_words(line, line_no);
        let Some(&keyword) = words.first() else {
            continue;
        };
        let end = Span {
            line: line_no,
            column: line.chars().count() + 1,
        };
        let mut lp = LineParser { words, pos: 1, end };
        if keyword.text == "system" {
            if decl.is_some() {
                return Err(ParseError::new(
                    ParseErrorCode::DuplicateSystem,
                    keyword.span,
                    "only one system line is allowed",
                ));
            }
            let d = parse_system(&mut lp)?;
            let sys = d.spin_system();
            decl = Some((d, sys));
            continue;
        }
        let Some((d, sys)) = decl.as_ref() else {
            return Err(ParseError::new(
                ParseErrorCode::MissingSystem,
                keyword.span,
                "the first statement must be a `system` line",
            ));
        };
        let event = parse_event(keyword, &mut lp, d, sys)?;
        if let Some(prev) = acquire_at {
            let (code, msg) = if matches!(event, Event::Acquire { .. }) {
                (
                    ParseErrorCode::DuplicateAcquire,
                    format!("second acquire; the first is on line {}", prev.line),
                )
            } else {
                (
                    ParseErrorCode::AcquireNotLast,
                    "acquire must be the last event".to_string(),
                )
            };
            return Err(ParseError::new(code, keyword.span, msg));
        }
        if matches!(event, Event::Acquire { .. }) {
            acquire_at = Some(keyword.span);
        }
        events.push(SpannedEvent {
            event,
            span: keyword.span,
        });
    }
    let Some((system, _)) = decl else {
        return Err(ParseError::new(
            ParseErrorCode::MissingSystem,
            Span {
                line: last_line.max(1),
                column: 1,
            },
            "script has no `system` line",
        ));
    };
    Ok(SequenceIr { system, events })
}
