use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Ball,
    Cube,
}

/// Ball `B_r(x0)` or cube `Q_r(x0)`; for cubes `radius` is the half side.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub center: Vec<f64>,
    pub radius: f64,
    pub kind: RegionKind,
}

impl Region {
    pub fn new(center: Vec<f64>, radius: f64, kind: RegionKind) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("bad region radius {radius}")));
        }
        Ok(Self {
            center,
            radius,
            kind,
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(center, radius, RegionKind::Ball)
    }

    /// Largest ball inscribed in the unit box of dimension `dim`.
    pub fn unit_ball(dim: usize) -> Self {
        Self {
            center: vec![0.5; dim],
            radius: 0.5,
            kind: RegionKind::Ball,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Concentric region with radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            center: self.center.clone(),
            radius: self.radius * factor,
            kind: self.kind,
        }
    }

    /// Distance from the center, in the norm matching the region kind.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let d = x.iter().zip(&self.center).map(|(a, b)| a - b);
        match self.kind {
            RegionKind::Ball => d.map(|t| t * t).sum::<f64>().sqrt(),
            RegionKind::Cube => d.fold(0.0, |m, t| m.max(t.abs())),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x) < self.radius
    }

    /// Whether the closed region lies in the unit box.
    pub fn within_unit_box(&self) -> bool {
        const SLACK: f64 = 1e-12;
        self.center
            .iter()
            .all(|&c| c - self.radius >= -SLACK && c + self.radius <= 1.0 + SLACK)
    }

    pub fn require_in_unit_box(&self) -> Result<()> {
        if self.within_unit_box() {
            Ok(())
        } else {
            Err(Error::RegionOutsideDomain)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        let b = Region::unit_ball(2);
        assert!(b.contains(&[0.5, 0.9]));
        assert!(!b.contains(&[0.9, 0.9]));
        let q = Region::new(vec![0.5, 0.5], 0.5, RegionKind::Cube).unwrap();
        assert!(q.contains(&[0.9, 0.9]));
        assert!(b.scaled(0.5).within_unit_box());
        assert!(!Region::ball(vec![0.9, 0.5], 0.2).unwrap().within_unit_box());
    }
}
