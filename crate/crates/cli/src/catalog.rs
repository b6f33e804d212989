//! Text syntax for catalog objects used in scenario files.
//!
//! ```text
//! manifold := pt | S^1 | T^2 | S^<even> | (manifold x manifold)
//! bundle   := trivial(r) | line(k) | bott(p) | sum(bundle, ...) | tensor(bundle, bundle)
//! unitary  := id(N) | winding(k) | sum(unitary, ...)
//! map      := id | const | pr1 | pr2 | deg(w)
//! ```

use rz_pairing::forms::{BundleData, CatalogMap, K1Element, ModelManifold};
use rz_pairing::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{tok}'")))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in '{}'", self.pos, self.src))
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
            .count();
        let text = &rest[..len];
        let v = text.parse::<i64>().map_err(|_| self.error("expected an integer"))?;
        self.pos += len;
        Ok(v)
    }

    fn finish<T>(mut self, value: T) -> Result<T> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(value)
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn call_arg(&mut self, name: &str) -> Result<Option<i64>> {
        if self.eat(&format!("{name}(")) {
            let v = self.int()?;
            self.expect(")")?;
            Ok(Some(v))
        } else {
            Ok(None)
        }
    }

    fn list<T>(&mut self, item: impl Fn(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.eat(",") {
            out.push(item(self)?);
        }
        self.expect(")")?;
        Ok(out)
    }
}

fn nonneg(v: i64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Parse(format!("{what} must be a non-negative integer, got {v}")))
}

fn manifold_at(c: &mut Cursor) -> Result<ModelManifold> {
    if c.eat("pt") {
        return Ok(ModelManifold::Point);
    }
    if c.eat("T^2") {
        return Ok(ModelManifold::Torus2);
    }
    if c.eat("S^") {
        let n = c.int()?;
        return if n == 1 { Ok(ModelManifold::Circle) } else { ModelManifold::sphere(nonneg(n, "sphere dimension")?) };
    }
    if c.eat("(") {
        let a = manifold_at(c)?;
        c.expect("x")?;
        let b = manifold_at(c)?;
        c.expect(")")?;
        return Ok(ModelManifold::product(a, b));
    }
    Err(c.error("expected a manifold"))
}

pub fn manifold(src: &str) -> Result<ModelManifold> {
    let mut c = Cursor::new(src);
    let m = manifold_at(&mut c)?;
    c.finish(m)
}

fn bundle_at(c: &mut Cursor) -> Result<BundleData> {
    if let Some(r) = c.call_arg("trivial")? {
        return Ok(BundleData::Trivial(nonneg(r, "rank")?));
    }
    if let Some(k) = c.call_arg("line")? {
        return Ok(BundleData::Line(k));
    }
    if let Some(p) = c.call_arg("bott")? {
        return Ok(BundleData::Bott(nonneg(p, "bott degree")?));
    }
    if c.eat("sum(") {
        return Ok(BundleData::Sum(c.list(bundle_at)?));
    }
    if c.eat("tensor(") {
        let a = bundle_at(c)?;
        c.expect(",")?;
        let b = bundle_at(c)?;
        c.expect(")")?;
        return Ok(BundleData::tensor(a, b));
    }
    Err(c.error("expected a bundle"))
}

pub fn bundle(src: &str) -> Result<BundleData> {
    let mut c = Cursor::new(src);
    let b = bundle_at(&mut c)?;
    c.finish(b)
}

fn unitary_at(c: &mut Cursor) -> Result<K1Element> {
    if let Some(n) = c.call_arg("id")? {
        return Ok(K1Element::identity(nonneg(n, "rank")? as usize));
    }
    if let Some(k) = c.call_arg("winding")? {
        return Ok(K1Element::Winding(k));
    }
    if c.eat("sum(") {
        return Ok(K1Element::direct_sum(c.list(unitary_at)?));
    }
    Err(c.error("expected a unitary map"))
}

pub fn unitary(src: &str) -> Result<K1Element> {
    let mut c = Cursor::new(src);
    let g = unitary_at(&mut c)?;
    c.finish(g)
}

/// `const` maps to the base point of `target`.
pub fn map(src: &str, target: &ModelManifold) -> Result<CatalogMap> {
    let mut c = Cursor::new(src);
    let m = if let Some(w) = c.call_arg("deg")? {
        CatalogMap::SelfMap { degree: w }
    } else if c.eat("id") {
        CatalogMap::Identity
    } else if c.eat("const") {
        CatalogMap::constant(target.clone())
    } else if c.eat("pr1") {
        CatalogMap::ProjectLeft
    } else if c.eat("pr2") {
        CatalogMap::ProjectRight
    } else {
        return Err(c.error("expected a map"));
    };
    c.finish(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_catalog_objects() {
        assert_eq!(manifold("(S^2 x T^2)").unwrap().to_string(), "(S^2 x T^2)");
        assert_eq!(manifold("S^1").unwrap(), ModelManifold::Circle);
        assert!(manifold("S^3").is_err());
        assert!(manifold("S^2 junk").is_err());
        assert_eq!(bundle("sum(line(-2), tensor(bott(1), trivial(3)))").unwrap().to_string(), "sum(line(-2), tensor(bott(1), trivial(3)))");
        assert_eq!(unitary("sum(winding(2), id(1))").unwrap().rank(), 2);
        assert!(bundle("trivial(-1)").is_err());
        assert_eq!(map("deg(-3)", &ModelManifold::Circle).unwrap(), CatalogMap::SelfMap { degree: -3 });
        assert!(map("proj", &ModelManifold::Circle).is_err());
    }
}
