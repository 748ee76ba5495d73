//! S-expression serialization for proof trees. Round-trips losslessly;
//! symbols containing delimiters are pipe-quoted.

use super::{ConstraintSet, ProofTree, RuleTag, Sequent, SideCondition};
use crate::constraints::Verdict;
use crate::syntax::{Clause, Constraint, ElabClause, Goal, PredAtom, Program, Term};
use num::BigRational;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sx {
    Sym(String),
    List(Vec<Sx>),
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SexprError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unbalanced parenthesis at byte {0}")]
    Unbalanced(usize),
    #[error("malformed node: expected {0}")]
    Malformed(&'static str),
}

fn sym(s: impl Into<String>) -> Sx {
    Sx::Sym(s.into())
}

fn list(items: Vec<Sx>) -> Sx {
    Sx::List(items)
}

fn needs_quote(s: &str) -> bool {
    s.is_empty()
        || s.chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '|')
}

fn write_sx(out: &mut String, sx: &Sx) {
    match sx {
        Sx::Sym(s) => {
            if needs_quote(s) {
                out.push('|');
                for c in s.chars() {
                    if c == '|' || c == '\\' {
                        out.push('\\');
                    }
                    out.push(c);
                }
                out.push('|');
            } else {
                out.push_str(s);
            }
        }
        Sx::List(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_sx(out, item);
            }
            out.push(')');
        }
    }
}

fn parse_sx(input: &str) -> Result<Sx, SexprError> {
    let bytes: Vec<char> = input.chars().collect();
    let mut pos = 0usize;
    let sx = parse_one(&bytes, &mut pos)?;
    skip_ws(&bytes, &mut pos);
    if pos != bytes.len() {
        return Err(SexprError::Unbalanced(pos));
    }
    Ok(sx)
}

fn skip_ws(b: &[char], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_one(b: &[char], pos: &mut usize) -> Result<Sx, SexprError> {
    skip_ws(b, pos);
    if *pos >= b.len() {
        return Err(SexprError::Eof);
    }
    match b[*pos] {
        '(' => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(b, pos);
                if *pos >= b.len() {
                    return Err(SexprError::Eof);
                }
                if b[*pos] == ')' {
                    *pos += 1;
                    return Ok(Sx::List(items));
                }
                items.push(parse_one(b, pos)?);
            }
        }
        ')' => Err(SexprError::Unbalanced(*pos)),
        '|' => {
            *pos += 1;
            let mut out = String::new();
            while *pos < b.len() {
                match b[*pos] {
                    '\\' => {
                        *pos += 1;
                        if *pos >= b.len() {
                            return Err(SexprError::Eof);
                        }
                        out.push(b[*pos]);
                        *pos += 1;
                    }
                    '|' => {
                        *pos += 1;
                        return Ok(Sx::Sym(out));
                    }
                    c => {
                        out.push(c);
                        *pos += 1;
                    }
                }
            }
            Err(SexprError::Eof)
        }
        _ => {
            let start = *pos;
            while *pos < b.len()
                && !b[*pos].is_whitespace()
                && b[*pos] != '('
                && b[*pos] != ')'
            {
                *pos += 1;
            }
            Ok(Sx::Sym(b[start..*pos].iter().collect()))
        }
    }
}

fn term_sx(t: &Term) -> Sx {
    match t {
        Term::Var(v) => list(vec![sym("var"), sym(v.clone())]),
        Term::Num(q) => list(vec![sym("num"), sym(q.to_string())]),
        Term::App(f, args) => {
            let mut items = vec![sym("app"), sym(f.clone())];
            items.extend(args.iter().map(term_sx));
            list(items)
        }
    }
}

fn constraint_sx(c: &Constraint) -> Sx {
    match c {
        Constraint::True => sym("true"),
        Constraint::False => sym("false"),
        Constraint::Eq(a, b) => list(vec![sym("eq"), term_sx(a), term_sx(b)]),
        Constraint::Atom(s, args) => {
            let mut items = vec![sym("atom"), sym(s.clone())];
            items.extend(args.iter().map(term_sx));
            list(items)
        }
        Constraint::And(a, b) => list(vec![sym("and"), constraint_sx(a), constraint_sx(b)]),
        Constraint::Implies(a, b) => {
            list(vec![sym("implies"), constraint_sx(a), constraint_sx(b)])
        }
        Constraint::Exists(v, b) => {
            list(vec![sym("exists"), sym(v.clone()), constraint_sx(b)])
        }
        Constraint::Forall(v, b) => {
            list(vec![sym("forall"), sym(v.clone()), constraint_sx(b)])
        }
    }
}

fn patom_sx(a: &PredAtom) -> Sx {
    let mut items = vec![sym("patom"), sym(a.pred.clone())];
    items.extend(a.args.iter().map(term_sx));
    list(items)
}

fn goal_sx(g: &Goal) -> Sx {
    match g {
        Goal::Atom(a) => list(vec![sym("gatom"), patom_sx(a)]),
        Goal::Constraint(c) => list(vec![sym("gc"), constraint_sx(c)]),
        Goal::And(a, b) => list(vec![sym("gand"), goal_sx(a), goal_sx(b)]),
        Goal::Or(a, b) => list(vec![sym("gor"), goal_sx(a), goal_sx(b)]),
        Goal::ClauseImplies(d, g) => list(vec![sym("gimpld"), clause_sx(d), goal_sx(g)]),
        Goal::ConstraintImplies(c, g) => {
            list(vec![sym("gimplc"), constraint_sx(c), goal_sx(g)])
        }
        Goal::Exists(v, g) => list(vec![sym("gex"), sym(v.clone()), goal_sx(g)]),
        Goal::Forall(v, g) => list(vec![sym("gall"), sym(v.clone()), goal_sx(g)]),
    }
}

fn clause_sx(c: &Clause) -> Sx {
    match c {
        Clause::Atom(a) => list(vec![sym("fact"), patom_sx(a)]),
        Clause::And(a, b) => list(vec![sym("dand"), clause_sx(a), clause_sx(b)]),
        Clause::Implies(g, head) => list(vec![sym("dimpl"), goal_sx(g), patom_sx(head)]),
        Clause::Forall(v, d) => list(vec![sym("dall"), sym(v.clone()), clause_sx(d)]),
    }
}

fn rule_sx(r: &RuleTag) -> Sx {
    match r {
        RuleTag::ConstraintAxiom => list(vec![sym("rule"), sym("constraint")]),
        RuleTag::Backchain { variant } => list(vec![
            sym("rule"),
            sym("clause"),
            list(vec![
                sym("vars"),
                list(variant.vars.iter().map(|v| sym(v.clone())).collect()),
            ]),
            list(vec![sym("body"), goal_sx(&variant.body)]),
            list(vec![sym("head"), patom_sx(&variant.head)]),
        ]),
        RuleTag::OrRight(k) => list(vec![sym("rule"), sym("or"), sym(k.to_string())]),
        RuleTag::AndRight => list(vec![sym("rule"), sym("and")]),
        RuleTag::ImplyClauseRight => list(vec![sym("rule"), sym("imply-clause")]),
        RuleTag::ImplyConstraintRight => list(vec![sym("rule"), sym("imply-constraint")]),
        RuleTag::ExistsRight { var, witness } => list(vec![
            sym("rule"),
            sym("exists"),
            sym(var.clone()),
            list(vec![sym("witness"), constraint_sx(witness)]),
        ]),
        RuleTag::ForallRight { var } => {
            list(vec![sym("rule"), sym("forall"), sym(var.clone())])
        }
    }
}

fn side_sx(s: &SideCondition) -> Sx {
    list(vec![
        sym("side"),
        list(
            std::iter::once(sym("premises"))
                .chain(s.premises.iter().map(constraint_sx))
                .collect(),
        ),
        list(vec![sym("conclusion"), constraint_sx(&s.conclusion)]),
        list(vec![
            sym("verdict"),
            sym(match s.verdict {
                Verdict::True => "true",
                Verdict::False => "false",
                Verdict::Unknown => "unknown",
            }),
        ]),
    ])
}

fn proof_sx(p: &ProofTree) -> Sx {
    let mut items = vec![
        sym("proof"),
        list(vec![
            sym("sequent"),
            list(
                std::iter::once(sym("program"))
                    .chain(p.conclusion.program.clauses().iter().map(clause_sx))
                    .collect(),
            ),
            list(
                std::iter::once(sym("constraints"))
                    .chain(p.conclusion.constraints.items().iter().map(constraint_sx))
                    .collect(),
            ),
            list(vec![sym("goal"), goal_sx(&p.conclusion.goal)]),
        ]),
        rule_sx(&p.rule),
    ];
    if let Some(side) = &p.side {
        items.push(side_sx(side));
    }
    items.push(list(
        std::iter::once(sym("premises"))
            .chain(p.premises.iter().map(proof_sx))
            .collect(),
    ));
    list(items)
}

pub fn render_proof(p: &ProofTree) -> String {
    let mut out = String::new();
    write_sx(&mut out, &proof_sx(p));
    let _ = writeln!(&mut out);
    out
}

// ------- parsing back -------

fn expect_list<'a>(sx: &'a Sx, what: &'static str) -> Result<&'a [Sx], SexprError> {
    match sx {
        Sx::List(items) => Ok(items),
        Sx::Sym(_) => Err(SexprError::Malformed(what)),
    }
}

fn expect_sym<'a>(sx: &'a Sx, what: &'static str) -> Result<&'a str, SexprError> {
    match sx {
        Sx::Sym(s) => Ok(s),
        Sx::List(_) => Err(SexprError::Malformed(what)),
    }
}

fn term_of(sx: &Sx) -> Result<Term, SexprError> {
    let items = expect_list(sx, "term")?;
    match expect_sym(items.first().ok_or(SexprError::Malformed("term"))?, "term")? {
        "var" => Ok(Term::Var(expect_sym(&items[1], "var name")?.to_string())),
        "num" => {
            let s = expect_sym(&items[1], "numeral")?;
            BigRational::from_str(s)
                .map(Term::Num)
                .map_err(|_| SexprError::Malformed("numeral"))
        }
        "app" => {
            let f = expect_sym(&items[1], "constructor")?.to_string();
            let args = items[2..]
                .iter()
                .map(term_of)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::App(f, args))
        }
        _ => Err(SexprError::Malformed("term")),
    }
}

fn constraint_of(sx: &Sx) -> Result<Constraint, SexprError> {
    if let Sx::Sym(s) = sx {
        return match s.as_str() {
            "true" => Ok(Constraint::True),
            "false" => Ok(Constraint::False),
            _ => Err(SexprError::Malformed("constraint")),
        };
    }
    let items = expect_list(sx, "constraint")?;
    match expect_sym(&items[0], "constraint head")? {
        "eq" => Ok(Constraint::Eq(term_of(&items[1])?, term_of(&items[2])?)),
        "atom" => {
            let s = expect_sym(&items[1], "atom symbol")?.to_string();
            let args = items[2..]
                .iter()
                .map(term_of)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Constraint::Atom(s, args))
        }
        "and" => Ok(Constraint::and(
            constraint_of(&items[1])?,
            constraint_of(&items[2])?,
        )),
        "implies" => Ok(Constraint::implies(
            constraint_of(&items[1])?,
            constraint_of(&items[2])?,
        )),
        "exists" => Ok(Constraint::exists(
            expect_sym(&items[1], "binder")?.to_string(),
            constraint_of(&items[2])?,
        )),
        "forall" => Ok(Constraint::forall(
            expect_sym(&items[1], "binder")?.to_string(),
            constraint_of(&items[2])?,
        )),
        _ => Err(SexprError::Malformed("constraint")),
    }
}

fn patom_of(sx: &Sx) -> Result<PredAtom, SexprError> {
    let items = expect_list(sx, "atom")?;
    if expect_sym(&items[0], "atom")? != "patom" {
        return Err(SexprError::Malformed("atom"));
    }
    let pred = expect_sym(&items[1], "predicate")?.to_string();
    let args = items[2..]
        .iter()
        .map(term_of)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PredAtom { pred, args })
}

fn goal_of(sx: &Sx) -> Result<Goal, SexprError> {
    let items = expect_list(sx, "goal")?;
    match expect_sym(&items[0], "goal head")? {
        "gatom" => Ok(Goal::Atom(patom_of(&items[1])?)),
        "gc" => Ok(Goal::Constraint(constraint_of(&items[1])?)),
        "gand" => Ok(Goal::And(
            Box::new(goal_of(&items[1])?),
            Box::new(goal_of(&items[2])?),
        )),
        "gor" => Ok(Goal::Or(
            Box::new(goal_of(&items[1])?),
            Box::new(goal_of(&items[2])?),
        )),
        "gimpld" => Ok(Goal::ClauseImplies(
            Box::new(clause_of(&items[1])?),
            Box::new(goal_of(&items[2])?),
        )),
        "gimplc" => Ok(Goal::ConstraintImplies(
            constraint_of(&items[1])?,
            Box::new(goal_of(&items[2])?),
        )),
        "gex" => Ok(Goal::Exists(
            expect_sym(&items[1], "binder")?.to_string(),
            Box::new(goal_of(&items[2])?),
        )),
        "gall" => Ok(Goal::Forall(
            expect_sym(&items[1], "binder")?.to_string(),
            Box::new(goal_of(&items[2])?),
        )),
        _ => Err(SexprError::Malformed("goal")),
    }
}

fn clause_of(sx: &Sx) -> Result<Clause, SexprError> {
    let items = expect_list(sx, "clause")?;
    match expect_sym(&items[0], "clause head")? {
        "fact" => Ok(Clause::Atom(patom_of(&items[1])?)),
        "dand" => Ok(Clause::And(
            Box::new(clause_of(&items[1])?),
            Box::new(clause_of(&items[2])?),
        )),
        "dimpl" => Ok(Clause::Implies(
            Box::new(goal_of(&items[1])?),
            patom_of(&items[2])?,
        )),
        "dall" => Ok(Clause::Forall(
            expect_sym(&items[1], "binder")?.to_string(),
            Box::new(clause_of(&items[2])?),
        )),
        _ => Err(SexprError::Malformed("clause")),
    }
}

fn rule_of(items: &[Sx]) -> Result<RuleTag, SexprError> {
    match expect_sym(&items[1], "rule name")? {
        "constraint" => Ok(RuleTag::ConstraintAxiom),
        "clause" => {
            let vars_items = expect_list(&items[2], "variant vars")?;
            let vars = expect_list(&vars_items[1], "variant vars")?
                .iter()
                .map(|v| expect_sym(v, "variant var").map(|s| s.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let body_items = expect_list(&items[3], "variant body")?;
            let body = goal_of(&body_items[1])?;
            let head_items = expect_list(&items[4], "variant head")?;
            let head = patom_of(&head_items[1])?;
            Ok(RuleTag::Backchain {
                variant: ElabClause { vars, body, head },
            })
        }
        "or" => {
            let k: u8 = expect_sym(&items[2], "disjunct")?
                .parse()
                .map_err(|_| SexprError::Malformed("disjunct"))?;
            Ok(RuleTag::OrRight(k))
        }
        "and" => Ok(RuleTag::AndRight),
        "imply-clause" => Ok(RuleTag::ImplyClauseRight),
        "imply-constraint" => Ok(RuleTag::ImplyConstraintRight),
        "exists" => {
            let var = expect_sym(&items[2], "binder")?.to_string();
            let w = expect_list(&items[3], "witness")?;
            Ok(RuleTag::ExistsRight {
                var,
                witness: constraint_of(&w[1])?,
            })
        }
        "forall" => Ok(RuleTag::ForallRight {
            var: expect_sym(&items[2], "binder")?.to_string(),
        }),
        _ => Err(SexprError::Malformed("rule")),
    }
}

fn proof_of(sx: &Sx) -> Result<ProofTree, SexprError> {
    let items = expect_list(sx, "proof")?;
    if expect_sym(&items[0], "proof")? != "proof" {
        return Err(SexprError::Malformed("proof"));
    }
    let seq_items = expect_list(&items[1], "sequent")?;
    let program_items = expect_list(&seq_items[1], "program")?;
    let program = Program::new(
        program_items[1..]
            .iter()
            .map(clause_of)
            .collect::<Result<Vec<_>, _>>()?,
    );
    let cs_items = expect_list(&seq_items[2], "constraints")?;
    let constraints = ConstraintSet::from_iter(
        cs_items[1..]
            .iter()
            .map(constraint_of)
            .collect::<Result<Vec<_>, _>>()?,
    );
    let goal_items = expect_list(&seq_items[3], "goal")?;
    let goal = goal_of(&goal_items[1])?;

    let rule_items = expect_list(&items[2], "rule")?;
    let rule = rule_of(rule_items)?;

    let mut idx = 3;
    let mut side = None;
    if let Sx::List(maybe_side) = &items[idx] {
        if matches!(maybe_side.first(), Some(Sx::Sym(s)) if s == "side") {
            let prem_items = expect_list(&maybe_side[1], "side premises")?;
            let premises = prem_items[1..]
                .iter()
                .map(constraint_of)
                .collect::<Result<Vec<_>, _>>()?;
            let concl_items = expect_list(&maybe_side[2], "side conclusion")?;
            let conclusion = constraint_of(&concl_items[1])?;
            let verdict_items = expect_list(&maybe_side[3], "side verdict")?;
            let verdict = match expect_sym(&verdict_items[1], "verdict")? {
                "true" => Verdict::True,
                "false" => Verdict::False,
                _ => Verdict::Unknown,
            };
            side = Some(SideCondition {
                premises,
                conclusion,
                verdict,
            });
            idx += 1;
        }
    }
    let prem_items = expect_list(&items[idx], "premises")?;
    let premises = prem_items[1..]
        .iter()
        .map(proof_of)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofTree {
        conclusion: Sequent {
            program,
            constraints,
            goal,
        },
        rule,
        side,
        premises,
    })
}

pub fn parse_proof(text: &str) -> Result<ProofTree, SexprError> {
    proof_of(&parse_sx(text.trim())?)
}
