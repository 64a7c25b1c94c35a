use alloc::vec::Vec;

/// Values indexed by day on the panel's day axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DaySeries {
    pub days: Vec<usize>,
    pub values: Vec<f64>,
}

impl DaySeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_on(&self, day: usize) -> Option<f64> {
        self.days.binary_search(&day).ok().map(|i| self.values[i])
    }
}
