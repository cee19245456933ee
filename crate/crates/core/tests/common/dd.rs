//! Minimal double-double arithmetic for oracle-side series sums.
//!
//! Independent of the library's internal extended-precision kernel on
//! purpose: products here use an fma-based two_prod, so a defect in either
//! implementation cannot hide in the other.

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        quick_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        quick_two_sum(q1, q2)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::from_f64(0.0);
        }
        let s = self.hi.sqrt();
        let sd = Dd::from_f64(s);
        let e = self.sub(sd.mul(sd));
        quick_two_sum(s, e.hi / (2.0 * s))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
