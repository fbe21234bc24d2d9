//! Geodesic primitives: great-circle distance and spherical midpoints.

use crate::error::{Error, Result};

/// Mean Earth radius in kilometers; ranking by distance at city scale is
/// insensitive to ellipsoidal corrections.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A point on the sphere. Latitude in [-90, 90], longitude normalized
/// into (-180, 180].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate ({lat}, {lon})"
            )));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidInput(format!("latitude {lat} out of range")));
        }
        Ok(Self {
            lat,
            lon: normalize_lon(lon),
        })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }
}

fn normalize_lon(lon: f64) -> f64 {
    let mut l = lon % 360.0;
    if l <= -180.0 {
        l += 360.0;
    } else if l > 180.0 {
        l -= 360.0;
    }
    l
}

/// Great-circle distance between two points, in kilometers.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();

    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    let c = 2.0 * h.sqrt().atan2((1.0 - h).sqrt());

    EARTH_RADIUS_KM * c
}

/// Spherical centroid: convert to 3-D unit vectors, average, renormalize.
///
/// A single point is returned unchanged. Fails for an empty list and for
/// configurations whose mean vector vanishes (e.g. antipodal pairs).
pub fn geographic_midpoint(points: &[GeoPoint]) -> Result<GeoPoint> {
    match points {
        [] => Err(Error::EmptyMidpoint),
        [only] => Ok(*only),
        _ => {
            let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
            for p in points {
                let lat = p.lat.to_radians();
                let lon = p.lon.to_radians();
                x += lat.cos() * lon.cos();
                y += lat.cos() * lon.sin();
                z += lat.sin();
            }
            let n = points.len() as f64;
            let (x, y, z) = (x / n, y / n, z / n);
            let norm = (x * x + y * y + z * z).sqrt();
            if norm < 1e-12 {
                return Err(Error::DegenerateMidpoint);
            }
            let lat = (z / norm).asin().to_degrees();
            let lon = y.atan2(x).to_degrees();
            GeoPoint::new(lat, lon)
        }
    }
}
