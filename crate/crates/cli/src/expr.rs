//! Parsers for the CLI literal syntaxes: algebra-element expressions
//! `c*[u|g|v|W] + …` and germ literals `g@point`.

use ssg_core::groupoid::{Cell, Clopen, Germ};
use ssg_core::steinberg::{AlgebraElement, Rational, Ring, Scalar};
use ssg_core::word::{EvPeriodicWord, FiniteWord};
use ssg_core::{Automaton, GroupElement};

fn parse_letters(s: &str) -> Result<FiniteWord, String> {
    let s = s.trim();
    if s.is_empty() || s == "ε" {
        return Ok(FiniteWord::empty());
    }
    let letters = s
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| format!("bad letter `{}`", c))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiniteWord(letters))
}

fn parse_coefficient(ring: Ring, s: &str) -> Result<Scalar, String> {
    let s = s.trim();
    let r = if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator `{}`", n))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator `{}`", d))?;
        if d == 0 {
            return Err("zero denominator".to_string());
        }
        Rational::new(n, d)
    } else {
        let n: i64 = s.parse().map_err(|_| format!("bad coefficient `{}`", s))?;
        Rational::from_integer(n)
    };
    ring.from_rational(r).map_err(|e| e.to_string())
}

/// One `[u|g|v|W]` cell literal; `W` is a comma list of cylinder words, and
/// an empty `W` means the full boundary.
pub fn parse_cell(aut: &Automaton, s: &str) -> Result<Cell, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected `[u|g|v|W]`, got `{}`", s))?;
    let fields: Vec<&str> = inner.split('|').collect();
    if fields.len() != 4 {
        return Err(format!("expected four `|`-separated fields in `{}`", s));
    }
    let u = parse_letters(fields[0])?;
    let g = GroupElement::parse(aut, fields[1])?;
    let v = parse_letters(fields[2])?;
    let w = if fields[3].trim().is_empty() {
        Clopen::full()
    } else {
        let cyls = fields[3]
            .split(',')
            .map(parse_letters)
            .collect::<Result<Vec<_>, _>>()?;
        Clopen::from_cylinders(aut.alphabet.size, cyls)
    };
    Ok(Cell { u, g, v, w })
}

/// An algebra-element expression: `c*[u|g|v|W]` terms joined by `+` and `-`.
pub fn parse_element_expr(
    aut: &Automaton,
    ring: Ring,
    s: &str,
) -> Result<AlgebraElement, String> {
    // Split into signed terms at top level (no nesting in this grammar).
    let mut terms = Vec::new();
    let mut rest = s.trim();
    let mut sign = 1i64;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r.trim_start();
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r.trim_start();
    }
    while !rest.is_empty() {
        // A term ends at the first top-level + or - after the closing `]`.
        let close = rest
            .find(']')
            .ok_or_else(|| format!("unterminated cell in `{}`", s))?;
        let term = &rest[..=close];
        let (coeff_str, cell_str) = match term.find('[') {
            Some(0) => ("1", term),
            Some(open) => {
                let c = term[..open].trim().trim_end_matches('*').trim();
                (if c.is_empty() { "1" } else { c }, &term[open..])
            }
            None => return Err(format!("expected `[` in term `{}`", term)),
        };
        let mut coeff = parse_coefficient(ring, coeff_str)?;
        if sign < 0 {
            coeff = ring.neg(&coeff).map_err(|e| e.to_string())?;
        }
        let cell = parse_cell(aut, cell_str)?;
        terms.push((coeff, cell));
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        sign = if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
            1
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r.trim_start();
            -1
        } else {
            return Err(format!("expected `+` or `-` before `{}`", rest));
        };
    }
    AlgebraElement::from_terms(ring, terms).map_err(|e| e.to_string())
}

/// A germ literal `g@point`, e.g. `b@(1)` or `b.c@0(01)`.
pub fn parse_germ(aut: &Automaton, s: &str) -> Result<Germ, String> {
    let (g, p) = s
        .split_once('@')
        .ok_or_else(|| format!("expected `g@point`, got `{}`", s))?;
    let elem = GroupElement::parse(aut, g)?;
    let base = EvPeriodicWord::parse(p)?;
    Ok(Germ::of_element(elem, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssg_core::samples;

    #[test]
    fn parses_cells_and_expressions() {
        let aut = samples::grigorchuk();
        let cell = parse_cell(&aut, "[0|a|1|00,01]").unwrap();
        assert_eq!(cell.u, FiniteWord(vec![0]));
        assert_eq!(cell.v, FiniteWord(vec![1]));
        assert_eq!(cell.w.cylinders().len(), 1); // merged to the cylinder 0

        let f = parse_element_expr(&aut, Ring::Q, "[|b||] + -1*[|c||]").unwrap();
        assert_eq!(f.terms.len(), 2);
        let g = parse_element_expr(&aut, Ring::Q, "1/2*[|b||] - [|b||]").unwrap();
        assert_eq!(g.terms.len(), 1);
        assert_eq!(
            g.terms[0].0,
            Scalar::Q(Rational::new(-1, 2))
        );

        let expr = parse_element_expr(&aut, Ring::Zmod(2), "[|e||]+[|b||]+[|c||]+[|d||]").unwrap();
        assert_eq!(expr.terms.len(), 4);
        assert!(parse_element_expr(&aut, Ring::Zmod(2), "1/2*[|b||]").is_err());
    }

    #[test]
    fn parses_germs() {
        let aut = samples::grigorchuk();
        let germ = parse_germ(&aut, "b.c@0(01)").unwrap();
        assert_eq!(germ.g, GroupElement::parse(&aut, "b.c").unwrap());
        assert_eq!(germ.base, EvPeriodicWord::parse("0(01)").unwrap());
        assert!(parse_germ(&aut, "b(1)").is_err());
    }
}
