//! Canonical text for terms and formulas, inserting only the parentheses
//! the grammar needs (plus around `&` directly under `|`).

use super::{Formula, Term, EQ};

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    formula(f, 0, false, &mut out);
    out
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    term(t, 0, &mut out);
    out
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

/// Quantifier bodies extend as far right as possible, so an open-ended
/// formula followed by more input must be parenthesized.
fn open_ended(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::Not(g) => open_ended(g),
        Formula::Or(_, b) | Formula::And(_, b) | Formula::Implies(_, b) | Formula::Iff(_, b) => open_ended(b),
        _ => false,
    }
}

fn formula(f: &Formula, min: u8, closed: bool, out: &mut String) {
    if precedence(f) < min || (closed && open_ended(f)) {
        out.push('(');
        formula(f, 0, false, out);
        out.push(')');
        return;
    }
    let binary = |a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8, out: &mut String| {
        formula(a, lmin, true, out);
        out.push_str(op);
        formula(b, rmin, closed, out);
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(p, args) if p == EQ && args.len() == 2 => {
            term(&args[0], 0, out);
            out.push_str(" = ");
            term(&args[1], 0, out);
        }
        Formula::Atom(p, args) => application(p, args, out),
        Formula::DerefAtom(head, args) => dereference(head, args, out),
        Formula::Not(g) => {
            out.push('~');
            formula(g, UNARY, closed, out);
        }
        Formula::Iff(a, b) => binary(a, " <=> ", b, IFF, IMPLIES, out),
        Formula::Implies(a, b) => binary(a, " => ", b, OR, IMPLIES, out),
        Formula::Or(a, b) => binary(a, " | ", b, UNARY, if matches!(**b, Formula::And(..)) { UNARY } else { OR }, out),
        Formula::And(a, b) => binary(a, " & ", b, UNARY, AND, out),
        Formula::Exists(x, t, body) | Formula::Forall(x, t, body) => {
            out.push(if matches!(f, Formula::Exists(..)) { '?' } else { '!' });
            out.push_str(&format!("{x}[{t}]: "));
            formula(body, 0, false, out);
        }
        Formula::GuardC(body) | Formula::GuardI(body) => {
            out.push_str(if matches!(f, Formula::GuardC(_)) { "<<c: " } else { "<<i: " });
            formula(body, 0, false, out);
            out.push_str(">>");
        }
    }
}

fn application(name: &str, args: &[Term], out: &mut String) {
    out.push_str(name);
    if !args.is_empty() {
        arguments(args, out);
    }
}

fn arguments(args: &[Term], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        term(a, 0, out);
    }
    out.push(')');
}

fn dereference(head: &Term, args: &[Term], out: &mut String) {
    out.push_str("$(");
    term(head, 0, out);
    out.push(')');
    arguments(args, out);
}

fn term(t: &Term, min: u8, out: &mut String) {
    match t {
        Term::Apply(op, args) if args.len() == 2 && matches!(op.as_str(), "+" | "-" | "*") => {
            let (level, lmin, rmin) = if op == "*" { (2, 2, 3) } else { (1, 1, 2) };
            if level < min {
                out.push('(');
            }
            term(&args[0], lmin, out);
            out.push_str(&format!(" {op} "));
            term(&args[1], rmin, out);
            if level < min {
                out.push(')');
            }
        }
        Term::Var(x) => out.push_str(x),
        Term::Apply(f, args) => application(f, args, out),
        Term::Nat(n) => out.push_str(&n.to_string()),
        Term::ConceptRef(s) => {
            out.push('`');
            out.push_str(s);
        }
        Term::Concept(s) => {
            out.push('@');
            out.push_str(s);
        }
        Term::Deref(head, args) => dereference(head, args, out),
    }
}
