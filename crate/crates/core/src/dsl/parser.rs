//! Recursive-descent parser for `.ccd` and `.csys` files.
//!
//! Every `;`-terminated statement and every braced block is a recovery
//! point: after a syntax error the parser skips to the end of the enclosing
//! statement and carries on, so independent mistakes are all reported.

use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use crate::diag::{has_errors, Code, Diagnostic, SourceSpan};
use crate::model::*;
use crate::time::{parse_decimal_nanos, DecimalError, Nanos, NANOS_PER_MILLI, NANOS_PER_SEC};

type PResult<T> = Result<T, ()>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    syntax: Code,
    value: Code,
}

impl Parser {
    fn new(text: &str, file: &str, syntax: Code, value: Code) -> Self {
        let file: Arc<str> = Arc::from(file);
        Parser { toks: tokenize(text, &file), pos: 0, diags: Vec::new(), syntax, value }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.at_kw(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        let hit = self.peek() == tok;
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        let code = if matches!(self.peek(), Tok::Invalid(_)) { Code::E104 } else { self.syntax };
        self.diags.push(Diagnostic::new(code, self.span(), format!("expected {expected}, found {found}")));
        Err(())
    }

    fn error(&mut self, code: Code, span: SourceSpan, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(code, span, message));
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            self.fail(&tok.describe())
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident::at(name, span))
            }
            _ => self.fail("an identifier"),
        }
    }

    fn number(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Number(text) => {
                let span = self.bump().span;
                Ok((text, span))
            }
            _ => self.fail("a number"),
        }
    }

    fn frequency(&mut self) -> PResult<(f64, SourceSpan)> {
        let (text, span) = self.number()?;
        self.expect_kw("Hz")?;
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok((v, span)),
            _ => {
                self.error(self.value, span, format!("frequency `{text}` is out of range"));
                Err(())
            }
        }
    }

    /// `NUM unit` where unit is `s` or `ms`.
    fn duration(&mut self) -> PResult<(Nanos, SourceSpan)> {
        let (text, span) = self.number()?;
        let unit = if self.eat_kw("s") {
            NANOS_PER_SEC
        } else if self.eat_kw("ms") {
            NANOS_PER_MILLI
        } else {
            return self.fail("a time unit (`s` or `ms`)");
        };
        match parse_decimal_nanos(&text, unit) {
            Ok(v) => Ok((v, span)),
            Err(e) => {
                let why = match e {
                    DecimalError::TooPrecise => "is finer than 1 ns",
                    DecimalError::Overflow => "is out of range",
                    DecimalError::Malformed => "is malformed",
                };
                self.error(self.value, span, format!("duration `{text}` {why}"));
                Err(())
            }
        }
    }

    /// `[ a , b ]` of durations.
    fn duration_pair(&mut self) -> PResult<(Nanos, Nanos, SourceSpan)> {
        let open = self.expect(Tok::LBracket)?;
        let (a, _) = self.duration()?;
        self.expect(Tok::Comma)?;
        let (b, _) = self.duration()?;
        let close = self.expect(Tok::RBracket)?;
        Ok((a, b, open.to(&close)))
    }

    /// Skip to the end of the current statement: past the next `;` or braced
    /// block at this nesting level, stopping before a closing `}`.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => return,
                Tok::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        return;
                    }
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Parse `{ item* }` with per-item recovery.
    fn block(&mut self, mut item: impl FnMut(&mut Self) -> PResult<()>) -> PResult<SourceSpan> {
        self.expect(Tok::LBrace)?;
        loop {
            match self.peek() {
                Tok::RBrace => return Ok(self.bump().span),
                Tok::Eof => return self.fail("`}`"),
                _ => {
                    let before = self.pos;
                    if item(self).is_err() {
                        self.recover();
                        if self.pos == before {
                            // Guarantee progress on a stray token.
                            self.bump();
                        }
                    }
                }
            }
        }
    }

    fn finish(&mut self) {
        if self.peek() != &Tok::Eof {
            let _ = self.fail::<()>("end of file");
        }
    }
}

// ---------------------------------------------------------------------------
// Component files

/// Parse a `.ccd` component definition. Returns no definition when any error
/// was reported.
pub fn parse_component_definition(text: &str, file: &str) -> (Option<ComponentDefinition>, Vec<Diagnostic>) {
    let mut p = Parser::new(text, file, Code::E100, Code::E103);
    let comp = component_file(&mut p);
    if comp.is_ok() {
        p.finish();
    }
    if let Ok(c) = &comp {
        check_component_refs(c, &mut p.diags);
    }
    let ok = !has_errors(&p.diags);
    (comp.ok().filter(|_| ok), p.diags)
}

fn component_file(p: &mut Parser) -> PResult<ComponentDefinition> {
    let start = p.expect_kw("component")?;
    let name = p.ident()?;
    let mut comp = ComponentDefinition { name, ..Default::default() };
    let end = p.block(|p| component_item(p, &mut comp))?;
    comp.loc = Loc(start.to(&end));
    Ok(comp)
}

fn component_item(p: &mut Parser, comp: &mut ComponentDefinition) -> PResult<()> {
    let start = p.span();
    let is_in = p.at_kw("inport");
    if p.eat_kw("inport") || p.eat_kw("outport") {
        let name = p.ident()?;
        p.expect(Tok::Colon)?;
        let message_type = p.ident()?;
        let end = p.expect(Tok::Semi)?;
        let loc = Loc(start.to(&end));
        if is_in {
            comp.in_ports.push(InPortDef { name, message_type, loc });
        } else {
            comp.out_ports.push(OutPortDef { name, message_type, loc });
        }
        return Ok(());
    }
    if p.eat_kw("compound") {
        let name = p.ident()?;
        p.expect(Tok::Eq)?;
        let combination = if p.eat_kw("AND") {
            Combination::And
        } else if p.eat_kw("OR") {
            Combination::Or
        } else {
            return p.fail("`AND` or `OR`");
        };
        p.expect(Tok::LParen)?;
        let mut members = vec![p.ident()?];
        while p.eat(&Tok::Comma) {
            members.push(p.ident()?);
        }
        p.expect(Tok::RParen)?;
        let end = p.expect(Tok::Semi)?;
        if members.len() < 2 {
            p.error(Code::E100, start.to(&end), format!("compound `{name}` needs at least two members"));
        }
        comp.compounds.push(CompoundInPortDef { name, combination, members, loc: Loc(start.to(&end)) });
        return Ok(());
    }
    let kind = if p.eat_kw("preemptive") {
        Some(TaskKind::Preemptive)
    } else if p.eat_kw("cooperative") {
        Some(TaskKind::Cooperative)
    } else {
        None
    };
    if p.at_kw("task") {
        p.bump();
        let name = p.ident()?;
        let mut task = TaskDef {
            name,
            kind: kind.unwrap_or_default(),
            reads: Vec::new(),
            writes: Vec::new(),
            constraint: None,
            loc: Loc::default(),
        };
        let end = p.block(|p| task_item(p, &mut task))?;
        task.loc = Loc(start.to(&end));
        if task.writes.is_empty() {
            p.error(
                Code::E100,
                task.name.span().clone(),
                format!("task `{}` must write at least one OutPort", task.name),
            );
        }
        comp.tasks.push(task);
        return Ok(());
    }
    if kind.is_some() {
        return p.fail("`task`");
    }
    p.fail("`inport`, `outport`, `compound` or `task`")
}

fn task_item(p: &mut Parser, task: &mut TaskDef) -> PResult<()> {
    let start = p.span();
    if p.eat_kw("reads") {
        let port = p.ident()?;
        let dependency = if p.eat_kw("optional") { Dependency::Optional } else { Dependency::Strict };
        p.expect(Tok::Semi)?;
        task.reads.push(ReadDep { port, dependency });
        Ok(())
    } else if p.eat_kw("writes") {
        let port = p.ident()?;
        p.expect(Tok::Semi)?;
        task.writes.push(port);
        Ok(())
    } else if p.eat_kw("activation") {
        p.expect(Tok::LBracket)?;
        let (min_freq, _) = p.frequency()?;
        p.expect(Tok::Comma)?;
        let (max_freq, _) = p.frequency()?;
        p.expect(Tok::RBracket)?;
        let changeable = !p.eat_kw("fixed");
        let end = p.expect(Tok::Semi)?;
        if task.constraint.is_some() {
            p.error(
                Code::E100,
                start.to(&end),
                format!("task `{}` declares more than one activation constraint", task.name),
            );
        }
        task.constraint = Some(ActivationConstraint { min_freq, max_freq, changeable, loc: Loc(start.to(&end)) });
        Ok(())
    } else {
        p.fail("`reads`, `writes` or `activation`")
    }
}

fn check_component_refs(c: &ComponentDefinition, diags: &mut Vec<Diagnostic>) {
    for t in &c.tasks {
        for w in &t.writes {
            if c.out_port(w.as_str()).is_none() {
                diags.push(Diagnostic::new(
                    Code::E101,
                    w.span().clone(),
                    format!("task `{}` writes undeclared OutPort `{}`", t.name, w),
                ));
            }
        }
        for r in &t.reads {
            if c.in_port(r.port.as_str()).is_none() && c.compound(r.port.as_str()).is_none() {
                diags.push(Diagnostic::new(
                    Code::E102,
                    r.port.span().clone(),
                    format!("task `{}` reads undeclared InPort `{}`", t.name, r.port),
                ));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// System files

/// Parse a `.csys` system configuration. Names are not resolved here.
pub fn parse_system_configuration(text: &str, file: &str) -> (Option<SystemConfiguration>, Vec<Diagnostic>) {
    let mut p = Parser::new(text, file, Code::E200, Code::E203);
    let sys = system_file(&mut p);
    if sys.is_ok() {
        p.finish();
    }
    let ok = !has_errors(&p.diags);
    (sys.ok().filter(|_| ok), p.diags)
}

fn system_file(p: &mut Parser) -> PResult<SystemConfiguration> {
    let start = p.expect_kw("system")?;
    let name = p.ident()?;
    let mut sys = SystemConfiguration { name, ..Default::default() };
    let end = p.block(|p| system_item(p, &mut sys))?;
    sys.loc = Loc(start.to(&end));
    Ok(sys)
}

fn port_ref(p: &mut Parser) -> PResult<PortRef> {
    let instance = p.ident()?;
    p.expect(Tok::Dot)?;
    let port = p.ident()?;
    Ok(PortRef { instance, port })
}

fn system_item(p: &mut Parser, sys: &mut SystemConfiguration) -> PResult<()> {
    let start = p.span();
    if p.eat_kw("instance") {
        let name = p.ident()?;
        p.expect(Tok::Colon)?;
        let component = p.ident()?;
        let mut inst = ComponentInstance { name, component, task_configs: Vec::new(), loc: Loc::default() };
        let end = p.block(|p| task_config(p, &mut inst))?;
        inst.loc = Loc(start.to(&end));
        sys.instances.push(inst);
        Ok(())
    } else if p.eat_kw("connect") {
        let from = port_ref(p)?;
        p.expect(Tok::Arrow)?;
        let to = port_ref(p)?;
        let delay = if p.eat_kw("delay") { p.duration()?.0 } else { Nanos::ZERO };
        let end = p.expect(Tok::Semi)?;
        sys.connections.push(Connection { from, to, delay, loc: Loc(start.to(&end)) });
        Ok(())
    } else if p.eat_kw("chain") {
        let name = p.ident()?;
        p.expect(Tok::Eq)?;
        let mut stages = vec![port_ref(p)?];
        while p.eat(&Tok::Arrow) {
            stages.push(port_ref(p)?);
        }
        let spec = if p.eat_kw("expect") {
            let (min, max, span) = p.duration_pair()?;
            if min > max {
                p.error(Code::E203, span, "latency spec minimum exceeds maximum");
            }
            Some(LatencySpec { min, max })
        } else {
            None
        };
        let end = p.expect(Tok::Semi)?;
        if stages.len() < 2 {
            p.error(Code::E201, start.to(&end), format!("chain `{name}` needs at least two OutPort stages"));
        }
        sys.chains.push(CauseEffectChain { name, stages, spec, loc: Loc(start.to(&end)) });
        Ok(())
    } else {
        p.fail("`instance`, `connect` or `chain`")
    }
}

fn task_config(p: &mut Parser, inst: &mut ComponentInstance) -> PResult<()> {
    let start = p.expect_kw("task")?;
    let task = p.ident()?;
    let source = if p.eat_kw("periodic") {
        let (frequency, span) = p.frequency()?;
        if frequency <= 0.0 {
            p.error(Code::E203, span, "timer frequency must be positive");
        }
        ActivationSource::PeriodicTimer { frequency }
    } else if p.eat_kw("datatriggered") {
        let port = p.ident()?;
        let mut prescaler = 1;
        if p.eat(&Tok::Slash) {
            let (text, span) = p.number()?;
            match text.parse::<u32>() {
                Ok(k) if k >= 1 => prescaler = k,
                _ => p.error(Code::E202, span, format!("prescaler `{text}` must be an integer >= 1")),
            }
        }
        ActivationSource::DataTriggered { port, prescaler }
    } else if p.eat_kw("sporadic") {
        if p.peek() == &Tok::LBracket {
            let (min, max, span) = p.duration_pair()?;
            if min == Nanos::ZERO || min > max {
                p.error(Code::E203, span, "sporadic interarrival bounds need 0 < min <= max");
            }
            ActivationSource::Sporadic { min_interarrival: Some(min), max_interarrival: Some(max) }
        } else {
            ActivationSource::Sporadic { min_interarrival: None, max_interarrival: None }
        }
    } else {
        return p.fail("`periodic`, `datatriggered` or `sporadic`");
    };
    let exec = if p.eat_kw("exec") {
        let (bcet, wcet, span) = p.duration_pair()?;
        if bcet > wcet {
            p.error(Code::E203, span, "execution time needs bcet <= wcet");
        }
        Some(ExecTime { bcet, wcet })
    } else {
        None
    };
    let end = p.expect(Tok::Semi)?;
    inst.task_configs.push(TaskConfig { task, source, exec, loc: Loc(start.to(&end)) });
    Ok(())
}
