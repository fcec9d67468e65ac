#pragma once

#include <span>
#include <vector>

#include "fracdose/rng.hpp"

namespace fracdose::dqn {

struct Transition {
    std::vector<double> obs;
    int action;
    double reward;
    std::vector<double> next_obs;
    bool done;
};

// FIFO ring buffer of transitions with struct-of-arrays storage. Minibatch
// indices are drawn uniformly without replacement (rejection on duplicates).
class ReplayBuffer {
  public:
    ReplayBuffer(int capacity, int frame_dim);

    void push(std::span<const double> obs, int action, double reward,
              std::span<const double> next_obs, bool done);

    int size() const { return size_; }
    int capacity() const { return capacity_; }
    int frame_dim() const { return frame_dim_; }

    void sample_indices(int batch, Rng& rng, std::vector<int>& out) const;

    const double* obs_at(int i) const { return obs_.data() + static_cast<size_t>(i) * frame_dim_; }
    const double* next_obs_at(int i) const {
        return next_obs_.data() + static_cast<size_t>(i) * frame_dim_;
    }
    int action_at(int i) const { return actions_[i]; }
    double reward_at(int i) const { return rewards_[i]; }
    bool done_at(int i) const { return dones_[i] != 0; }

    // flat serialization for training snapshots
    std::vector<double> pack() const;
    void unpack(std::span<const double> data);

  private:
    int capacity_;
    int frame_dim_;
    int size_ = 0;
    int head_ = 0;  // next slot to overwrite
    std::vector<double> obs_, next_obs_;
    std::vector<double> rewards_;
    std::vector<int> actions_;
    std::vector<unsigned char> dones_;
};

}  // namespace fracdose::dqn
