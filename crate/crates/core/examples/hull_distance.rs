//! Convex hulls in 6-D and the distance from the origin to a polytope.

use graspkit::hull::{
    affine_rank, boundary_distance, contains_origin, convex_hull, inscribed_cross_radius,
    min_norm_point, PointSet,
};

fn cross_polytope(shift: f64) -> PointSet {
    let mut pts = Vec::new();
    for axis in 0..6 {
        for s in [-1.0, 1.0] {
            let mut p = vec![0.0; 6];
            p[axis] = s;
            p[0] += shift;
            pts.push(p);
        }
    }
    PointSet::from_points(&pts).expect("finite points")
}

fn main() -> graspkit::Result<()> {
    for shift in [0.0, 0.5, 2.0] {
        let ps = cross_polytope(shift);
        let hull = convex_hull(&ps)?;
        let near = min_norm_point(&ps);
        println!("shift {shift}");
        println!(
            "  rank {}  facets {}  min facet offset {:.4}",
            affine_rank(&ps),
            hull.facet_count(),
            hull.min_offset()
        );
        println!("  strictly contains origin {}", contains_origin(&ps, true)?);
        println!("  nearest point distance {:.4}", near.distance);
        if near.distance == 0.0 {
            println!("  boundary distance {:.4}", boundary_distance(&ps)?);
            println!(
                "  inscribed cross radius {:?}",
                inscribed_cross_radius(&ps)?
            );
        }
    }
    Ok(())
}
