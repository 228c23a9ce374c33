use crate::model::BBox;
use crate::scalar::Scalar;

/// Intersection over union; zero for disjoint boxes.
pub fn box_iou<S: Scalar>(a: &BBox<S>, b: &BBox<S>) -> S {
    let inter = a.intersection_area(b);
    if inter.is_zero() {
        return S::zero();
    }
    let union = a.area() + b.area() - inter.clone();
    inter / union
}

/// IoU of every prediction (rows) against every ground truth (columns).
pub fn iou_matrix<S: Scalar>(preds: &[BBox<S>], gts: &[BBox<S>]) -> Vec<Vec<S>> {
    preds
        .iter()
        .map(|p| gts.iter().map(|g| box_iou(p, g)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_ratio, Exact};
    use proptest::prelude::*;

    fn b(x0: f64, y0: f64, x1: f64, y1: f64) -> BBox<f64> {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    // Counts unit pixels covered by each box.
    fn pixel_iou(a: [u32; 4], c: [u32; 4]) -> f64 {
        let (mut inter, mut union) = (0u64, 0u64);
        let xmax = a[2].max(c[2]);
        let ymax = a[3].max(c[3]);
        for x in 0..xmax {
            for y in 0..ymax {
                let ina = x >= a[0] && x < a[2] && y >= a[1] && y < a[3];
                let inc = x >= c[0] && x < c[2] && y >= c[1] && y < c[3];
                inter += (ina && inc) as u64;
                union += (ina || inc) as u64;
            }
        }
        inter as f64 / union as f64
    }

    #[test]
    fn hand_cases() {
        let a = b(0.0, 0.0, 10.0, 10.0);
        assert_eq!(box_iou(&a, &a), 1.0);
        assert_eq!(box_iou(&a, &b(20.0, 20.0, 30.0, 30.0)), 0.0);
        assert_eq!(box_iou(&a, &b(10.0, 0.0, 20.0, 10.0)), 0.0);
        assert_eq!(pixel_iou([0, 0, 10, 10], [5, 0, 15, 10]), 1.0 / 3.0);
        let third = box_iou(&a.cast::<Exact>(), &b(5.0, 0.0, 15.0, 10.0).cast::<Exact>());
        assert_eq!(third, exact_ratio(1, 3));
        assert!((box_iou(&a, &b(5.0, 0.0, 15.0, 10.0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision_agrees() {
        let a = b(0.0, 0.0, 10.0, 10.0).cast::<f32>();
        let c = b(5.0, 0.0, 15.0, 10.0).cast::<f32>();
        assert!((box_iou(&a, &c) - 1.0 / 3.0).abs() < 1e-6);
    }

    fn arb_box() -> impl Strategy<Value = [u32; 4]> {
        (0u32..20, 0u32..20, 1u32..12, 1u32..12).prop_map(|(x, y, w, h)| [x, y, x + w, y + h])
    }

    proptest! {
        #[test]
        fn symmetric_and_reflexive(p in arb_box(), q in arb_box()) {
            let bp = b(p[0] as f64, p[1] as f64, p[2] as f64, p[3] as f64).cast::<Exact>();
            let bq = b(q[0] as f64, q[1] as f64, q[2] as f64, q[3] as f64).cast::<Exact>();
            prop_assert_eq!(box_iou(&bp, &bq), box_iou(&bq, &bp));
            prop_assert_eq!(box_iou(&bp, &bp), exact_ratio(1, 1));
        }

        #[test]
        fn agrees_with_pixel_count(p in arb_box(), q in arb_box()) {
            let bp = b(p[0] as f64, p[1] as f64, p[2] as f64, p[3] as f64);
            let bq = b(q[0] as f64, q[1] as f64, q[2] as f64, q[3] as f64);
            prop_assert!((box_iou(&bp, &bq) - pixel_iou(p, q)).abs() < 1e-12);
        }
    }
}
