use std::collections::BTreeMap;

use super::lexer::{lex, Tok, Token};
use super::{Decl, DerivationFile, NamedDerivation, Obligation, ParseError};
use crate::kernel::{Derivation, Dir, FubiniKind, NatSite, Rule, Strategy};
use crate::syntax::{CatExpr, Formula, Polarity, Sequent, SignatureTable, Slot, TermExpr};

const RESERVED: [&str; 6] = ["end", "coend", "hom", "T", "fst", "snd"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sig: SignatureTable,
    defs: BTreeMap<String, Derivation>,
}

/// Parses a derivation file: declarations, derivations and obligations.
pub fn parse_derivation(text: &str) -> Result<DerivationFile, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig: SignatureTable::new(), defs: BTreeMap::new() };
    let mut file = DerivationFile::default();
    while p.peek() != &Tok::Eof {
        p.item(&mut file)?;
    }
    file.sig = p.sig;
    Ok(file)
}

/// Parses a sequent against a signature, e.g. for command-line arguments.
pub fn parse_sequent(text: &str, sig: &SignatureTable) -> Result<Sequent, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig: sig.clone(), defs: BTreeMap::new() };
    let s = p.sequent()?;
    p.expect(Tok::Eof)?;
    Ok(s)
}

/// Parses a category expression such as `C^op * D`.
pub fn parse_cat(text: &str) -> Result<CatExpr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig: SignatureTable::new(), defs: BTreeMap::new() };
    let c = p.cat()?;
    p.expect(Tok::Eof)?;
    Ok(c)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let (line, col) = self.here();
        ParseError::Unexpected {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn invalid(&self, at: (usize, usize), message: impl Into<String>) -> ParseError {
        ParseError::Invalid { line: at.0, col: at.1, message: message.into() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&[&t.to_string()]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn word(&mut self, w: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(n) if n == w => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&[&format!("`{w}`")])),
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(n) if n == w)
    }

    fn item(&mut self, file: &mut DerivationFile) -> Result<(), ParseError> {
        self.expect(Tok::LParen)?;
        let at = self.here();
        let kind = match self.peek() {
            Tok::Ident(k) => k.clone(),
            _ => return Err(self.unexpected(&["`cat`", "`atom`", "`functor`", "`derivation`", "`obligation`"])),
        };
        self.bump();
        match kind.as_str() {
            "cat" => {
                let n = self.ident()?;
                self.sig.declare_cat(&n).map_err(|e| self.invalid(at, e.to_string()))?;
                file.decls.push(Decl::Cat(n));
            }
            "atom" => {
                let n = self.ident()?;
                let mut slots = Vec::new();
                while self.eat(&Tok::LParen) {
                    let pol = match self.bump() {
                        Tok::Plus => Polarity::Pos,
                        Tok::Minus => Polarity::Neg,
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected(&["`+`", "`-`"]));
                        }
                    };
                    slots.push(Slot::new(self.cat()?, pol));
                    self.expect(Tok::RParen)?;
                }
                self.sig.declare_atom(&n, slots.clone()).map_err(|e| self.invalid(at, e.to_string()))?;
                file.decls.push(Decl::Atom(n, slots));
            }
            "functor" => {
                let n = self.ident()?;
                self.expect(Tok::LParen)?;
                let mut dom = Vec::new();
                while !self.eat(&Tok::RParen) {
                    dom.push(self.cat()?);
                }
                let cod = self.cat()?;
                self.sig.declare_functor(&n, dom.clone(), cod.clone()).map_err(|e| self.invalid(at, e.to_string()))?;
                file.decls.push(Decl::Functor(n, dom, cod));
            }
            "derivation" => {
                let n = self.ident()?;
                if self.defs.contains_key(&n) {
                    return Err(self.invalid(at, format!("duplicate name `{n}`")));
                }
                let reject = if self.eat(&Tok::Keyword("reject".into())) { Some(self.ident()?) } else { None };
                let deriv = self.node()?;
                self.defs.insert(n.clone(), deriv.clone());
                file.derivations.push(NamedDerivation { name: n, reject, deriv });
            }
            "obligation" => {
                let n = self.ident()?;
                if file.obligations.iter().any(|o| o.name == n) {
                    return Err(self.invalid(at, format!("duplicate name `{n}`")));
                }
                self.expect(Tok::Keyword("for".into()))?;
                let tat = self.here();
                let target = self.ident()?;
                if !self.defs.contains_key(&target) {
                    return Err(self.invalid(tat, format!("unknown derivation `{target}`")));
                }
                let strategy = if self.eat(&Tok::LParen) {
                    self.word("jeq")?;
                    let mut labels = Vec::new();
                    while !self.eat(&Tok::RParen) {
                        labels.push(self.ident()?);
                    }
                    Strategy::JEq(labels)
                } else {
                    self.word("direct")?;
                    Strategy::Direct
                };
                let lhs = self.node()?;
                let rhs = self.node()?;
                file.obligations.push(Obligation { name: n, target, strategy, lhs, rhs });
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected(&["`cat`", "`atom`", "`functor`", "`derivation`", "`obligation`"]));
            }
        }
        self.expect(Tok::RParen)
    }

    fn dir(&mut self) -> Result<Dir, ParseError> {
        if self.is_word("fwd") {
            self.bump();
            Ok(Dir::Fwd)
        } else if self.is_word("bwd") {
            self.bump();
            Ok(Dir::Bwd)
        } else {
            Err(self.unexpected(&["`fwd`", "`bwd`"]))
        }
    }

    fn label_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LBrack)?;
        let mut out = Vec::new();
        while !self.eat(&Tok::RBrack) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn node(&mut self) -> Result<Derivation, ParseError> {
        self.expect(Tok::LParen)?;
        let at = self.here();
        let name = match self.peek() {
            Tok::Ident(n) => n.clone(),
            _ => return Err(self.unexpected(&["rule name"])),
        };
        self.bump();
        if name == "ref" {
            let n = self.ident()?;
            let d = self.defs.get(&n).cloned().ok_or_else(|| self.invalid(at, format!("unknown derivation `{n}`")))?;
            self.expect(Tok::RParen)?;
            return Ok(d);
        }
        let rule = match name.as_str() {
            "id" => Rule::Id,
            "refl" => Rule::Refl,
            "pair" => Rule::Pair,
            "proj1" => Rule::Proj1,
            "proj2" => Rule::Proj2,
            "end-intro" => Rule::EndIntro,
            "end-elim" => Rule::EndElim,
            "coend-intro" => Rule::CoendIntro,
            "coend-elim" => Rule::CoendElim,
            "imp-func" => Rule::ImpFunc,
            "j-with-eq" => Rule::JWithEq,
            "yoneda" => Rule::Yoneda,
            "yoneda-inv" => Rule::YonedaInv,
            "coyoneda" => Rule::CoYoneda,
            "coyoneda-inv" => Rule::CoYonedaInv,
            "weaken" => Rule::Weaken(self.ident()?),
            "j" => Rule::J(self.ident()?),
            "jinv" => Rule::JInv(self.ident()?),
            "op-var" => Rule::OpVar(self.ident()?),
            "hole" => Rule::Hole(self.ident()?),
            "hom-rel-adj" => Rule::HomRelAdj(self.ident()?),
            "curry" => Rule::Curry(self.label_list()?),
            "uncurry" => Rule::Uncurry(self.label_list()?),
            "reindex" => {
                let var = self.ident()?;
                Rule::Reindex { var, term: self.term()? }
            }
            "exchange" => Rule::Exchange(self.ident()?, self.ident()?),
            "pair-ctx" => Rule::PairCtx(self.ident()?, self.ident()?, self.ident()?),
            "unpair-ctx" => Rule::UnpairCtx(self.ident()?, self.ident()?, self.ident()?),
            "nat-cut" => {
                if self.eat(&Tok::Keyword("goal".into())) {
                    Rule::NatCut(NatSite::Goal)
                } else {
                    Rule::NatCut(NatSite::Hyp(self.ident()?))
                }
            }
            "yoneda-goal" => Rule::YonedaGoal(self.dir()?),
            "coyoneda-hyp" => {
                let l = self.ident()?;
                Rule::CoYonedaHyp(l, self.dir()?)
            }
            "coend-frobenius" => Rule::CoendFrobenius(self.dir()?),
            "fubini" => {
                let k = match self.peek() {
                    Tok::Ident(k) if k == "swap" => FubiniKind::Swap,
                    Tok::Ident(k) if k == "pair" => FubiniKind::Pair,
                    Tok::Ident(k) if k == "unpair" => FubiniKind::Unpair,
                    _ => return Err(self.unexpected(&["`swap`", "`pair`", "`unpair`"])),
                };
                self.bump();
                Rule::Fubini(k)
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected(&["rule name"]));
            }
        };
        let concl = self.sequent()?;
        let mut premises = Vec::new();
        while self.peek() == &Tok::LParen {
            premises.push(self.node()?);
        }
        self.expect(Tok::RParen)?;
        Ok(Derivation::new(rule, concl, premises))
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        self.expect(Tok::LBrace)?;
        self.expect(Tok::LBrack)?;
        let mut ctx = Vec::new();
        if !self.eat(&Tok::RBrack) {
            loop {
                let n = self.ident()?;
                self.expect(Tok::Colon)?;
                ctx.push((n, self.cat()?));
                if self.eat(&Tok::RBrack) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.unexpected(&["`,`", "`]`"]));
                }
            }
        }
        let mut hyps = Vec::new();
        let mut scope = ctx.clone();
        if !self.eat(&Tok::Turnstile) {
            loop {
                let l = self.ident()?;
                self.expect(Tok::Colon)?;
                hyps.push((l, self.formula(&mut scope)?));
                if self.eat(&Tok::Turnstile) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.unexpected(&["`,`", "`|-`"]));
                }
            }
        }
        let goal = self.formula(&mut scope)?;
        self.expect(Tok::RBrace)?;
        Ok(Sequent::new(ctx, hyps, goal))
    }

    fn cat(&mut self) -> Result<CatExpr, ParseError> {
        let a = self.cat_post()?;
        if self.eat(&Tok::Star) {
            Ok(CatExpr::prod(a, self.cat()?))
        } else {
            Ok(a)
        }
    }

    fn cat_post(&mut self) -> Result<CatExpr, ParseError> {
        let mut c = match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                CatExpr::base(n)
            }
            Tok::One => {
                self.bump();
                CatExpr::Unit
            }
            Tok::LParen => {
                self.bump();
                let c = self.cat()?;
                self.expect(Tok::RParen)?;
                c
            }
            _ => return Err(self.unexpected(&["category"])),
        };
        while self.peek() == &Tok::Caret {
            self.bump();
            self.word("op")?;
            c = CatExpr::Op(Box::new(c));
        }
        Ok(c)
    }

    fn term(&mut self) -> Result<TermExpr, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(TermExpr::neg(self.ident()?))
            }
            Tok::Lt => {
                self.bump();
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::Gt)?;
                Ok(TermExpr::pair(a, b))
            }
            Tok::LParen => {
                self.bump();
                self.expect(Tok::RParen)?;
                Ok(TermExpr::Unit)
            }
            Tok::Ident(n) if n == "fst" || n == "snd" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(if n == "fst" { TermExpr::fst(t) } else { TermExpr::snd(t) })
            }
            Tok::Ident(n) => {
                self.bump();
                let mut pol = Polarity::Pos;
                if self.peek() == &Tok::Caret {
                    self.bump();
                    self.word("op")?;
                    pol = Polarity::Neg;
                    if self.peek() != &Tok::LParen {
                        return Err(self.unexpected(&["`(`"]));
                    }
                }
                if self.eat(&Tok::LParen) {
                    let args = self.args()?;
                    Ok(TermExpr::App(n, pol, args))
                } else {
                    Ok(TermExpr::var(n))
                }
            }
            _ => Err(self.unexpected(&["term"])),
        }
    }

    /// Comma-separated terms up to and including `)`.
    fn args(&mut self) -> Result<Vec<TermExpr>, ParseError> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.unexpected(&["`,`", "`)`"]));
            }
        }
    }

    fn is_binder(&self) -> bool {
        matches!(self.peek(), Tok::Ident(k) if k == "end" || k == "coend")
            && matches!(self.peek_at(1), Tok::Ident(_))
            && self.peek_at(2) == &Tok::Colon
    }

    fn formula(&mut self, scope: &mut Vec<(String, CatExpr)>) -> Result<Formula, ParseError> {
        if self.is_binder() {
            let is_end = self.is_word("end");
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let c = self.cat()?;
            self.expect(Tok::Dot)?;
            scope.push((x.clone(), c.clone()));
            let body = self.formula(scope);
            scope.pop();
            let body = body?;
            return Ok(if is_end { Formula::end(x, c, body) } else { Formula::coend(x, c, body) });
        }
        let a = self.conj(scope)?;
        if self.eat(&Tok::Arrow) {
            Ok(Formula::imp(a, self.formula(scope)?))
        } else {
            Ok(a)
        }
    }

    fn conj(&mut self, scope: &mut Vec<(String, CatExpr)>) -> Result<Formula, ParseError> {
        let a = self.prim(scope)?;
        if self.eat(&Tok::Star) {
            Ok(Formula::and(a, self.conj(scope)?))
        } else {
            Ok(a)
        }
    }

    fn prim(&mut self, scope: &mut Vec<(String, CatExpr)>) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula(scope)?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(n) if n == "T" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(n) if n == "hom" => {
                self.bump();
                let cat = if self.eat(&Tok::LBrack) {
                    let c = self.cat()?;
                    self.expect(Tok::RBrack)?;
                    Some(c)
                } else {
                    None
                };
                self.expect(Tok::LParen)?;
                let s = self.term()?;
                self.expect(Tok::Comma)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                let cat = match cat {
                    Some(c) => c,
                    None => t
                        .type_of(scope, &self.sig)
                        .map_err(|e| self.invalid(at, format!("cannot infer the category of `hom`: {e}")))?,
                };
                Ok(Formula::hom(cat, s, t))
            }
            Tok::Ident(n) if !RESERVED.contains(&n.as_str()) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    Ok(Formula::atom(n, self.args()?))
                } else {
                    Ok(Formula::atom(n, Vec::new()))
                }
            }
            _ => Err(self.unexpected(&["formula"])),
        }
    }
}
