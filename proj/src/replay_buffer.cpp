#include "fracdose/replay_buffer.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace fracdose::dqn {

ReplayBuffer::ReplayBuffer(int capacity, int frame_dim)
    : capacity_(capacity), frame_dim_(frame_dim) {
    if (capacity < 1) throw std::invalid_argument("replay capacity must be >= 1");
    if (frame_dim < 1) throw std::invalid_argument("replay frame_dim must be >= 1");
    obs_.assign(static_cast<size_t>(capacity) * frame_dim, 0.0);
    next_obs_.assign(static_cast<size_t>(capacity) * frame_dim, 0.0);
    rewards_.assign(capacity, 0.0);
    actions_.assign(capacity, 0);
    dones_.assign(capacity, 0);
}

void ReplayBuffer::push(std::span<const double> obs, int action, double reward,
                        std::span<const double> next_obs, bool done) {
    if (static_cast<int>(obs.size()) != frame_dim_ ||
        static_cast<int>(next_obs.size()) != frame_dim_) {
        throw std::invalid_argument("transition observation length mismatch");
    }
    std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<size_t>(head_) * frame_dim_);
    std::copy(next_obs.begin(), next_obs.end(),
              next_obs_.begin() + static_cast<size_t>(head_) * frame_dim_);
    actions_[head_] = action;
    rewards_[head_] = reward;
    dones_[head_] = done ? 1 : 0;
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

void ReplayBuffer::sample_indices(int batch, Rng& rng, std::vector<int>& out) const {
    if (batch > size_) throw std::invalid_argument("batch larger than buffer contents");
    out.clear();
    while (static_cast<int>(out.size()) < batch) {
        const int idx = rng.uniform_int(size_);
        if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
}

std::vector<double> ReplayBuffer::pack() const {
    std::vector<double> data;
    data.reserve(4 + static_cast<size_t>(size_) * (2 * frame_dim_ + 3));
    data.push_back(size_);
    data.push_back(head_);
    for (int i = 0; i < size_; ++i) {
        const double* o = obs_at(i);
        const double* n = next_obs_at(i);
        data.insert(data.end(), o, o + frame_dim_);
        data.insert(data.end(), n, n + frame_dim_);
        data.push_back(actions_[i]);
        data.push_back(rewards_[i]);
        data.push_back(dones_[i]);
    }
    return data;
}

void ReplayBuffer::unpack(std::span<const double> data) {
    if (data.size() < 2) throw std::runtime_error("replay payload too short");
    const int size = static_cast<int>(data[0]);
    const int head = static_cast<int>(data[1]);
    const size_t stride = 2 * static_cast<size_t>(frame_dim_) + 3;
    if (size < 0 || size > capacity_ || data.size() != 2 + stride * size) {
        throw std::runtime_error("replay payload shape mismatch");
    }
    size_ = size;
    head_ = head;
    for (int i = 0; i < size; ++i) {
        const double* rec = data.data() + 2 + stride * i;
        std::copy(rec, rec + frame_dim_, obs_.begin() + static_cast<size_t>(i) * frame_dim_);
        std::copy(rec + frame_dim_, rec + 2 * frame_dim_,
                  next_obs_.begin() + static_cast<size_t>(i) * frame_dim_);
        actions_[i] = static_cast<int>(rec[2 * frame_dim_]);
        rewards_[i] = rec[2 * frame_dim_ + 1];
        dones_[i] = rec[2 * frame_dim_ + 2] != 0.0 ? 1 : 0;
    }
}

}  // namespace fracdose::dqn
