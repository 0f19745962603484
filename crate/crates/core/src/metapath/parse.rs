//! Recursive-descent parser for description strings.
//!
//! ```text
//! select  := join ('|' join)*
//! join    := postfix ('.'? postfix)*
//! postfix := primary '*'*
//! primary := 'U' | 'P' | 'R' | '(' select ')' | '[' select ']'
//! ```
//! Whitespace is ignored. Joins associate to the left.

use super::{MetaPath, NodeType};
use crate::error::{Error, Result};

pub fn parse_description(text: &str) -> Result<MetaPath> {
    let tokens: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let expr = parser.select()?;
    if let Some((position, c)) = parser.peek() {
        return Err(Error::Syntax {
            position,
            message: format!("unexpected {c:?}"),
        });
    }
    Ok(expr)
}

struct Parser {
    tokens: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.tokens.get(self.pos).copied()
    }

    fn position(&self) -> usize {
        self.peek().map_or(self.end, |(p, _)| p)
    }

    fn select(&mut self) -> Result<MetaPath> {
        let mut left = self.join()?;
        while let Some((_, '|')) = self.peek() {
            self.pos += 1;
            let right = self.join()?;
            left = MetaPath::select(left, right)?;
        }
        Ok(left)
    }

    fn join(&mut self) -> Result<MetaPath> {
        let mut left = self.postfix()?;
        loop {
            match self.peek() {
                Some((_, '.')) => {
                    self.pos += 1;
                    let right = self.postfix()?;
                    left = MetaPath::concat(left, right)?;
                }
                Some((_, c)) if starts_primary(c) => {
                    let right = self.postfix()?;
                    left = MetaPath::concat(left, right)?;
                }
                _ => return Ok(left),
            }
        }
    }

    fn postfix(&mut self) -> Result<MetaPath> {
        let mut e = self.primary()?;
        while let Some((_, '*')) = self.peek() {
            self.pos += 1;
            e = MetaPath::repeat(e)?;
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<MetaPath> {
        let position = self.position();
        match self.peek() {
            Some((_, c)) if NodeType::from_symbol(c).is_some() => {
                self.pos += 1;
                Ok(MetaPath::Atom(NodeType::from_symbol(c).unwrap()))
            }
            Some((_, open @ ('(' | '['))) => {
                self.pos += 1;
                let inner = self.select()?;
                let close = if open == '(' { ')' } else { ']' };
                match self.peek() {
                    Some((_, c)) if c == close => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Syntax {
                        position: self.position(),
                        message: format!("expected {close:?} to close {open:?} at {position}"),
                    }),
                }
            }
            Some((_, c)) => Err(Error::Syntax {
                position,
                message: format!("expected a node type or a group, found {c:?}"),
            }),
            None => Err(Error::Syntax {
                position,
                message: "unexpected end of description".into(),
            }),
        }
    }
}

fn starts_primary(c: char) -> bool {
    matches!(c, 'U' | 'P' | 'R' | '(' | '[')
}
