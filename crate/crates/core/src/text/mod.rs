//! Text forms for the model objects, plus the scenario config format.
//!
//! ```text
//! cone:        orthant:4 | lorentz:3 | psd:3 | copositive:2 | lex
//!              | ray:3:[1,0,0] | grid:[0,0.25,0.5,0.75,1]
//! functional:  term (+ term)*        term: (number *)* atom | (number *)* ( functional )
//!              atom: covector:[..] | spindual:[..] | trace | trace:[[..],..]
//!                    | cp:[[..],..] | integral | eval@k | lexfirst | zero
//!                    | pullback(functional; map)
//! map:         identity | permdiag:(2,1):(0.5,2) | spin:[[..],..]:rho
//!              | congruence:[[..],..] | dense:[[..],..] | rankone(map; functional; point)
//! point:       point:[..] | point:[[..],..]
//! ```
//!
//! Permutations are written 1-based. Grid functionals (`integral`, `eval@k`)
//! and the bare `trace` take their grid or dimension from the cone.
//! Errors carry 1-based line and column numbers.

mod config;
mod cursor;

pub use config::{parse_config, Config};

use cursor::Cursor;

use crate::cones::{ConeSpec, Grid, Point};
use crate::error::Result;
use crate::numerics::{Mat, SymMat};
use crate::operators::{Functional, LinearMap};

/// Parse a cone in its canonical textual form.
pub fn parse_cone(src: &str) -> Result<ConeSpec> {
    let mut c = Cursor::new(src, 1, 1);
    let cone = cone(&mut c)?;
    c.finish()?;
    Ok(cone)
}

/// Parse a functional on the ambient space of `cone`.
pub fn parse_functional(src: &str, cone: &ConeSpec) -> Result<Functional> {
    let mut c = Cursor::new(src, 1, 1);
    let f = functional(&mut c, cone)?;
    c.finish()?;
    Ok(f)
}

/// Parse a linear map on the ambient space of `cone`.
pub fn parse_map(src: &str, cone: &ConeSpec) -> Result<LinearMap> {
    let mut c = Cursor::new(src, 1, 1);
    let m = map(&mut c, cone)?;
    c.finish()?;
    Ok(m)
}

/// Parse a point of the ambient space of `cone`.
pub fn parse_point(src: &str, cone: &ConeSpec) -> Result<Point> {
    let mut c = Cursor::new(src, 1, 1);
    let p = point(&mut c, cone)?;
    c.finish()?;
    Ok(p)
}

fn cone(c: &mut Cursor) -> Result<ConeSpec> {
    let start = c.mark();
    let word = c.ident()?;
    let cone = match word.as_str() {
        "orthant" | "lorentz" | "psd" | "copositive" => {
            c.expect(':')?;
            let n = c.uint()?;
            match word.as_str() {
                "orthant" => ConeSpec::Orthant { n },
                "lorentz" => ConeSpec::Lorentz { d: n },
                "psd" => ConeSpec::Psd { n },
                _ => ConeSpec::Copositive { n },
            }
        }
        "lex" => ConeSpec::Lexicographic,
        "ray" => {
            c.expect(':')?;
            let n_at = c.mark();
            let n = c.uint()?;
            c.expect(':')?;
            let direction = c.list()?;
            if direction.len() != n {
                return Err(c.error_at(n_at, format!("ray dimension {n} but direction has {} entries", direction.len())));
            }
            ConeSpec::Ray { direction }
        }
        "grid" => {
            c.expect(':')?;
            let at = c.mark();
            let nodes = c.list()?;
            ConeSpec::GridNonneg {
                grid: Grid::new(nodes).map_err(|e| c.wrap(at, e))?,
            }
        }
        other => return Err(c.error_at(start, format!("unknown cone family `{other}`"))),
    };
    cone.validate().map_err(|e| c.wrap(start, e))?;
    Ok(cone)
}

fn functional(c: &mut Cursor, cone: &ConeSpec) -> Result<Functional> {
    let mut terms = vec![term(c, cone)?];
    while c.eat('+') {
        terms.push(term(c, cone)?);
    }
    // A lone scaled spin-factor dual keeps its compact form.
    if let [(w, Functional::SpinDual { xhat, scale })] = terms.as_slice() {
        if *w > 0.0 && *scale == 1.0 {
            return Ok(Functional::SpinDual { xhat: xhat.clone(), scale: *w });
        }
    }
    Ok(Functional::combination(terms))
}

fn term(c: &mut Cursor, cone: &ConeSpec) -> Result<(f64, Functional)> {
    let mut weight = 1.0;
    while c.peek_number() {
        weight *= c.number()?;
        c.expect('*')?;
    }
    if c.eat('(') {
        let f = functional(c, cone)?;
        c.expect(')')?;
        return Ok((weight, f));
    }
    Ok((weight, atom(c, cone)?))
}

fn atom(c: &mut Cursor, cone: &ConeSpec) -> Result<Functional> {
    let start = c.mark();
    let word = c.ident()?;
    let need_grid = |c: &Cursor| {
        cone.grid()
            .cloned()
            .ok_or_else(|| c.error_at(start, format!("`{word}` needs a grid cone, not {cone}")))
    };
    Ok(match word.as_str() {
        "covector" => {
            c.expect(':')?;
            Functional::covector(c.list()?)
        }
        "spindual" => {
            c.expect(':')?;
            Functional::spin_dual(c.list()?)
        }
        "trace" => {
            if c.eat(':') {
                let at = c.mark();
                let rows = c.rows()?;
                Functional::TraceForm {
                    b: SymMat::from_rows(&rows).map_err(|e| c.wrap(at, e))?,
                }
            } else {
                let n = cone
                    .matrix_dim()
                    .ok_or_else(|| c.error_at(start, format!("bare `trace` needs a matrix cone, not {cone}")))?;
                Functional::TraceForm { b: SymMat::identity(n) }
            }
        }
        "cp" => {
            c.expect(':')?;
            Functional::CpForm { vectors: c.rows()? }
        }
        "integral" => Functional::TrapezoidIntegral { grid: need_grid(c)? },
        "eval" => {
            let grid = need_grid(c)?;
            c.expect('@')?;
            let at = c.mark();
            let node = c.uint()?;
            if node >= grid.len() {
                return Err(c.error_at(at, format!("node {node} outside a grid of {} nodes", grid.len())));
            }
            Functional::PointEvaluation { grid, node }
        }
        "lexfirst" => Functional::LexFirstCoord,
        "pullback" => {
            c.expect('(')?;
            let outer = functional(c, cone)?;
            c.expect(';')?;
            let m = map(c, cone)?;
            c.expect(')')?;
            Functional::Composed { outer: Box::new(outer), map: Box::new(m) }
        }
        "zero" => Functional::Combination { terms: Vec::new() },
        other => return Err(c.error_at(start, format!("unknown functional `{other}`"))),
    })
}

fn square(c: &mut Cursor) -> Result<Mat> {
    let at = c.mark();
    let rows = c.rows()?;
    Mat::from_rows(&rows).map_err(|e| c.wrap(at, e))
}

fn map(c: &mut Cursor, cone: &ConeSpec) -> Result<LinearMap> {
    let start = c.mark();
    let word = c.ident()?;
    let m = match word.as_str() {
        "identity" => LinearMap::Identity,
        "permdiag" => {
            c.expect(':')?;
            c.expect('(')?;
            let mut perm = vec![c.uint()?];
            while c.eat(',') {
                perm.push(c.uint()?);
            }
            c.expect(')')?;
            c.expect(':')?;
            c.expect('(')?;
            let mut diag = vec![c.number()?];
            while c.eat(',') {
                diag.push(c.number()?);
            }
            c.expect(')')?;
            if perm.contains(&0) {
                return Err(c.error_at(start, "permutations are written 1-based".into()));
            }
            let perm = perm.into_iter().map(|p| p - 1).collect();
            LinearMap::perm_diag(perm, diag).map_err(|e| c.wrap(start, e))?
        }
        "spin" => {
            c.expect(':')?;
            let at = c.mark();
            let q = square(c)?;
            c.expect(':')?;
            let rho = c.number()?;
            LinearMap::spin_auto(q, rho).map_err(|e| c.wrap(at, e))?
        }
        "congruence" => {
            c.expect(':')?;
            let at = c.mark();
            let m = square(c)?;
            LinearMap::congruence(m).map_err(|e| c.wrap(at, e))?
        }
        "dense" => {
            c.expect(':')?;
            LinearMap::Dense { matrix: square(c)? }
        }
        "rankone" => {
            c.expect('(')?;
            let s = map(c, cone)?;
            c.expect(';')?;
            let f = functional(c, cone)?;
            c.expect(';')?;
            let u = point(c, cone)?;
            c.expect(')')?;
            LinearMap::rank_one(s, f, u)
        }
        other => return Err(c.error_at(start, format!("unknown map `{other}`"))),
    };
    Ok(m)
}

fn point(c: &mut Cursor, cone: &ConeSpec) -> Result<Point> {
    let start = c.mark();
    let word = c.ident()?;
    if word != "point" {
        return Err(c.error_at(start, format!("expected `point:`, found `{word}`")));
    }
    c.expect(':')?;
    let at = c.mark();
    if c.peek_nested_list() {
        let rows = c.rows()?;
        if cone.matrix_dim().is_none() {
            return Err(c.error_at(at, format!("matrix point given for {cone}")));
        }
        let m = SymMat::from_rows(&rows).map_err(|e| c.wrap(at, e))?;
        let p = Point::matrix(m);
        cone.check_point(&p).map_err(|e| c.wrap(at, e))?;
        Ok(p)
    } else {
        let values = c.list()?;
        if cone.matrix_dim().is_some() {
            return Err(c.error_at(at, format!("{cone} points are written as rows `[[..],..]`")));
        }
        cone.point_from_raw(values).map_err(|e| c.wrap(at, e))
    }
}
