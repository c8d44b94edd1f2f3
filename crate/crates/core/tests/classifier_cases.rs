use blform_core::classifier::*;
use blform_core::datum::*;
use blform_core::exactla::*;

#[test]
fn normal_forms_classify_to_themselves() {
    let forms = [
        NormalForm::Zero,
        NormalForm::L1,
        NormalForm::L2,
        NormalForm::L3,
        NormalForm::L4(rat(0)),
        NormalForm::L4(rat(1)),
        NormalForm::L4(ratio(2, 3)),
        NormalForm::L4(rat(-5)),
    ];
    for nf in forms {
        let d = BlDatum::of_normal_form(&nf);
        let r = classify(&d).unwrap();
        assert_eq!(r.normal_form, nf);
        assert!(verify_witness(&d, &r.witness, &nf));
    }
}

#[test]
fn special_triangular_family() {
    let r = classify(&BlDatum::special_triangular(&rat(3))).unwrap();
    assert_eq!(r.normal_form, NormalForm::L4(rat(-2)));
    let r = classify(&BlDatum::special_triangular(&rat(1))).unwrap();
    assert_eq!(r.normal_form, NormalForm::L3);
    let r = classify(&BlDatum::special_triangular(&ratio(-1, 4))).unwrap();
    assert_eq!(r.normal_form, NormalForm::L4(ratio(5, 4)));
}

#[test]
fn hypothesis_and_validity_errors() {
    let d = BlDatum::special_triangular(&rat(2));
    let bad = BlDatum::new(d.pi(1).clone(), d.pi(2).clone(), d.pi(3).clone(), d.pi(1).clone())
        .unwrap();
    assert_eq!(classify(&bad), Err(ClassifyError::HypothesisViolated { j: 1 }));
    let singular = BlDatum::new(
        d.pi(1).clone(),
        RationalMatrix::zeros(2, 3),
        d.pi(3).clone(),
        d.pi(4).clone(),
    )
    .unwrap();
    assert!(matches!(classify(&singular), Err(ClassifyError::InvalidDatum(_))));
}

#[test]
fn cross_ratio_along_reference_line() {
    let line = Line::from_i64([1, 0, 0], [-1, 0, 1]);
    let d = BlDatum::of_normal_form(&NormalForm::L4(rat(5)));
    assert_eq!(cross_ratio_along(&d, &line).unwrap(), CrossRatio::Finite(rat(5)));
    assert_eq!(cross_ratio(&d).unwrap(), CrossRatio::Finite(rat(5)));
}

#[test]
fn cross_ratio_of_discrete_forms() {
    let of = |nf: NormalForm| cross_ratio(&BlDatum::of_normal_form(&nf));
    assert_eq!(of(NormalForm::L4(rat(1))).unwrap(), CrossRatio::Finite(rat(1)));
    assert_eq!(of(NormalForm::L3).unwrap(), CrossRatio::Finite(rat(0)));
    assert_eq!(of(NormalForm::L2).unwrap(), CrossRatio::Infinite);
    assert!(matches!(
        of(NormalForm::L1),
        Err(CrossRatioError::DegenerateConfiguration(_))
    ));
    assert_eq!(of(NormalForm::Zero), Err(CrossRatioError::Undefined));
    assert_eq!(of(NormalForm::L4(rat(0))), Err(CrossRatioError::Undefined));
}

#[test]
fn line_through_intersection_is_rejected() {
    let d = BlDatum::of_normal_form(&NormalForm::L4(rat(2)));
    let line = Line::from_i64([0, 0, 0], [1, 1, 1]);
    assert!(matches!(
        cross_ratio_along(&d, &line),
        Err(CrossRatioError::InadmissibleLine(_))
    ));
}

#[test]
fn equivalence_examples() {
    let tht = BlDatum::special_triangular(&rat(3));
    let l4 = BlDatum::of_normal_form(&NormalForm::L4(rat(-2)));
    assert!(equivalent(&tht, &l4).unwrap());
    let l1 = BlDatum::of_normal_form(&NormalForm::L1);
    let l2 = BlDatum::of_normal_form(&NormalForm::L2);
    assert!(!equivalent(&l1, &l2).unwrap());
    let a = BlDatum::of_normal_form(&NormalForm::L4(ratio(1, 2)));
    let b = BlDatum::of_normal_form(&NormalForm::L4(ratio(1, 3)));
    assert!(!equivalent(&a, &b).unwrap());
}
