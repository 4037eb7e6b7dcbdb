/// One interaction round as seen by the harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundLog {
    /// 1-based round index.
    pub t: usize,
    pub arm: usize,
    pub reward_pre: f64,
    pub corruption: f64,
    /// Always `reward_pre + corruption`.
    pub reward_post: f64,
    pub regret_inc: f64,
    pub budget_spent: f64,
}

impl RoundLog {
    pub fn new(
        t: usize,
        arm: usize,
        reward_pre: f64,
        corruption: f64,
        regret_inc: f64,
        budget_spent: f64,
    ) -> Self {
        debug_assert!(regret_inc >= 0.0);
        Self {
            t,
            arm,
            reward_pre,
            corruption,
            reward_post: reward_pre + corruption,
            regret_inc,
            budget_spent,
        }
    }
}
