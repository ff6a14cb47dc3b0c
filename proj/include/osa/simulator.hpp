#ifndef OSA_SIMULATOR_HPP
#define OSA_SIMULATOR_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "osa/error.hpp"
#include "osa/fls.hpp"
#include "osa/radio.hpp"

namespace osa {

enum class Policy { fls, nsu };

/// How primary users occupy their channels.
enum class PrimaryMode {
  dynamic,    // exponential ON/OFF toggling per channel
  always_on,  // every channel permanently licensed-busy
  absent      // no primary activity at all
};

inline const char* to_string(Policy p) noexcept { return p == Policy::fls ? "fls" : "nsu"; }

struct SimConfig {
  std::uint64_t rng_seed = 1;
  int num_secondary_users = 20;
  double area_width = 100.0;
  double area_height = 100.0;
  int num_channels = 15;
  std::vector<double> arrival_rates{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double mean_holding_time = 1.0;
  PrimaryMode primary_mode = PrimaryMode::dynamic;
  double primary_on_rate = 0.1;   // idle -> active
  double primary_off_rate = 0.4;  // active -> idle
  double sim_duration = 1000.0;
  int replications = 20;
  double warmup_fraction = 0.1;
  double max_speed = 5.0;              // m per time unit
  double efficiency_window = 100.0;    // time units
  bool fls_repack = true;              // FLS manager compacts occupants after releases
  double base_frequency_hz = 900e6;
  double channel_spacing_hz = 5e6;
  PrimaryUser primary;                 // position is redrawn per replication
  PathLossModel path_loss;

  void validate() const {
    if (num_channels <= 0) throw ConfigError("num_channels must be positive");
    if (num_secondary_users <= 0) throw ConfigError("num_secondary_users must be positive");
    if (!(area_width > 0.0) || !(area_height > 0.0)) throw ConfigError("area dimensions must be positive");
    if (arrival_rates.empty()) throw ConfigError("arrival_rates must not be empty");
    for (double r : arrival_rates) {
      if (!(r > 0.0)) throw ConfigError("arrival rates must be positive");
    }
    if (!(mean_holding_time > 0.0)) throw ConfigError("mean_holding_time must be positive");
    if (!(primary_on_rate > 0.0) || !(primary_off_rate > 0.0)) throw ConfigError("primary rates must be positive");
    if (!(sim_duration > 0.0)) throw ConfigError("sim_duration must be positive");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ConfigError("warmup_fraction must lie in [0, 1)");
    if (!(max_speed > 0.0)) throw ConfigError("max_speed must be positive");
    if (!(efficiency_window > 0.0)) throw ConfigError("efficiency_window must be positive");
    if (!(base_frequency_hz > 0.0) || !(channel_spacing_hz > 0.0)) {
      throw ConfigError("channel frequencies must be positive and strictly increasing");
    }
    if (!(primary.transmit_power_w > 0.0) || !(primary.carrier_frequency_hz > 0.0)) {
      throw ConfigError("primary transmit power and carrier frequency must be positive");
    }
    path_loss.validate();
  }

  bool operator==(const SimConfig&) const = default;
};

struct MetricsRow {
  double arrival_rate = 0.0;
  Policy policy = Policy::nsu;
  double blocking_probability = 0.0;
  double mean_free_spectrum = 0.0;
  double mean_allocated_spectrum = 0.0;
  double interference_spread = 0.0;
  double system_efficiency = 0.0;
  double channel_utilization = 0.0;
  // Diagnostics, not part of the CSV surface.
  double mean_primary_occupied = 0.0;
  double arrivals = 0.0;
  double blocked = 0.0;
  double dropped = 0.0;
};

struct Channel {
  int index = 0;
  double frequency_hz = 0.0;
  bool primary_active = false;
  std::optional<int> occupant;  // secondary user id
  std::uint64_t call = 0;       // request id of the occupying call

  bool is_free() const noexcept { return !primary_active && !occupant; }
};

inline std::optional<int> lowest_free_channel(std::span<const Channel> channels, int exclude = -1) {
  for (const auto& ch : channels) {
    if (ch.index != exclude && ch.is_free()) return ch.index;
  }
  return std::nullopt;
}

/// |f_max - f_min| over secondary-occupied channels; 0 with fewer than two.
inline double interference_spread(std::span<const Channel> channels) noexcept {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  for (const auto& ch : channels) {
    if (!ch.occupant) continue;
    if (n == 0) {
      lo = hi = ch.frequency_hz;
    } else {
      lo = std::min(lo, ch.frequency_hz);
      hi = std::max(hi, ch.frequency_hz);
    }
    ++n;
  }
  return n < 2 ? 0.0 : std::abs(hi - lo);
}

/// Processed over offered traffic (Erlang), clamped to [0, 1].
inline double system_efficiency(double processed_erlang, double offered_erlang) {
  if (!(offered_erlang > 0.0)) throw DomainError("system efficiency undefined without offered traffic");
  return std::clamp(processed_erlang / offered_erlang, 0.0, 1.0);
}

/// Time-weighted mean of a piecewise-constant signal, observed from
/// `window_start` on.
class TimeWeightedMean {
 public:
  explicit TimeWeightedMean(double window_start = 0.0) : start_(window_start), last_(window_start) {}

  /// The signal takes `value` from time t on.
  void set(double t, double value) {
    advance(t);
    value_ = value;
  }

  void advance(double t) {
    if (t > last_) {
      integral_ += value_ * (t - last_);
      last_ = t;
    }
  }

  double integral() const noexcept { return integral_; }

  double mean(double t_end) const {
    const double span = t_end - start_;
    if (!(span > 0.0)) throw DomainError("empty observation window");
    double integral = integral_;
    if (t_end > last_) integral += value_ * (t_end - last_);
    return integral / span;
  }

 private:
  double start_;
  double last_;
  double value_ = 0.0;
  double integral_ = 0.0;
};

/// Time-averaged busy channels over total channels.
inline double channel_utilization(const TimeWeightedMean& busy_channels, int num_channels, double t_end) {
  if (num_channels <= 0) throw DomainError("channel utilization needs at least one channel");
  return busy_channels.mean(t_end) / static_cast<double>(num_channels);
}

struct AdmissionDecision {
  std::optional<int> channel;  // empty: blocked
  std::size_t winner = 0;      // index into the contender list
  std::vector<double> possibilities;

  bool blocked() const noexcept { return !channel.has_value(); }
};

/// FCFS: the arriving call takes the lowest-index free channel or is blocked.
inline AdmissionDecision nsu_admit(std::span<const Channel> channels) {
  return AdmissionDecision{lowest_free_channel(channels), 0, {}};
}

/// Ranks contenders by possibility and grants the winner the lowest-index
/// free channel. Without a free channel nobody is ranked.
inline AdmissionDecision fls_admit(const FlsEngine& engine, std::span<const Channel> channels,
                                   std::span<const DescriptorVector> contenders) {
  AdmissionDecision d;
  d.channel = lowest_free_channel(channels);
  if (!d.channel) return d;
  auto sel = select_user(engine, contenders);
  d.winner = sel.index;
  d.possibilities = std::move(sel.possibilities);
  return d;
}

/// One FLS ranking performed during a replication.
struct DecisionRecord {
  double time = 0.0;
  std::vector<int> users;
  std::vector<DescriptorVector> descriptors;
  std::vector<double> possibilities;
  std::vector<double> doppler_hz;
  std::size_t winner = 0;
  int channel = 0;
};

namespace detail {

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kGeometryStream = 2;
constexpr std::uint64_t kPrimaryStreamBase = 1'000;
constexpr std::uint64_t kMobilityStreamBase = 1'000'000;

inline double exponential(std::mt19937_64& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace detail

/// Random-waypoint secondary user with its own mobility stream, so its
/// trajectory depends only on time and not on when it is queried.
class MobileUser {
 public:
  MobileUser(SecondaryUser su, double area_w, double area_h, double initial_efficiency, std::mt19937_64 rng)
      : su_(su), area_w_(area_w), area_h_(area_h), initial_efficiency_(initial_efficiency), rng_(std::move(rng)) {
    pick_waypoint();
  }

  const SecondaryUser& state() const noexcept { return su_; }

  void advance_to(double t) {
    double dt = t - last_update_;
    last_update_ = std::max(last_update_, t);
    if (dt <= 0.0 || su_.speed <= 0.0) return;
    while (dt > 0.0) {
      const double dx = waypoint_.x - su_.position.x;
      const double dy = waypoint_.y - su_.position.y;
      const double dist = std::hypot(dx, dy);
      const double reach = su_.speed * dt;
      if (reach >= dist) {
        su_.position = waypoint_;
        dt -= dist / su_.speed;
        pick_waypoint();
      } else {
        su_.position.x += dx / dist * reach;
        su_.position.y += dy / dist * reach;
        dt = 0.0;
      }
    }
    su_.position.x = std::clamp(su_.position.x, 0.0, area_w_);
    su_.position.y = std::clamp(su_.position.y, 0.0, area_h_);
  }

  /// Served/requested ratio over the sliding window, in percent. Falls back
  /// to the initial draw while the window is empty.
  double utilization_efficiency(double now, double window) {
    while (!history_.empty() && history_.front().first < now - window) history_.pop_front();
    if (history_.empty()) return initial_efficiency_;
    int served = 0;
    for (const auto& [t, ok] : history_) served += ok ? 1 : 0;
    su_.busy_spectrum_count = served;
    su_.available_spectrum_count = static_cast<int>(history_.size());
    return 100.0 * spectrum_efficiency(served, static_cast<int>(history_.size()));
  }

  void record_outcome(double t, bool served) { history_.emplace_back(t, served); }

 private:
  void pick_waypoint() {
    waypoint_ = {detail::uniform(rng_, 0.0, area_w_), detail::uniform(rng_, 0.0, area_h_)};
    su_.heading = std::atan2(waypoint_.y - su_.position.y, waypoint_.x - su_.position.x);
  }

  SecondaryUser su_;
  double area_w_;
  double area_h_;
  double initial_efficiency_;
  std::mt19937_64 rng_;
  Position waypoint_;
  double last_update_ = 0.0;
  std::deque<std::pair<double, bool>> history_;
};

/// A single discrete-event replication. Strictly sequential.
class Simulator {
 public:
  using Observer = std::function<void(const Simulator&)>;

  Simulator(const SimConfig& config, const FlsEngine& engine, double arrival_rate, Policy policy, std::uint64_t seed)
      : cfg_(config),
        engine_(engine),
        rate_(arrival_rate),
        policy_(policy),
        warmup_end_(config.warmup_fraction * config.sim_duration),
        arrival_rng_(detail::make_stream(seed, detail::kArrivalStream)),
        free_(warmup_end_),
        allocated_(warmup_end_),
        primary_(warmup_end_),
        spread_(warmup_end_) {
    cfg_.validate();
    if (!(rate_ > 0.0)) throw ConfigError("arrival rate must be positive");

    auto geo = detail::make_stream(seed, detail::kGeometryStream);
    pu_ = cfg_.primary;
    pu_.position = {detail::uniform(geo, 0.0, cfg_.area_width), detail::uniform(geo, 0.0, cfg_.area_height)};
    users_.reserve(static_cast<std::size_t>(cfg_.num_secondary_users));
    for (int u = 0; u < cfg_.num_secondary_users; ++u) {
      SecondaryUser su;
      su.id = u;
      su.position = {detail::uniform(geo, 0.0, cfg_.area_width), detail::uniform(geo, 0.0, cfg_.area_height)};
      su.speed = detail::uniform(geo, 0.0, cfg_.max_speed);
      const double eff = detail::uniform(geo, 0.0, 100.0);
      users_.emplace_back(su, cfg_.area_width, cfg_.area_height, eff,
                          detail::make_stream(seed, detail::kMobilityStreamBase + static_cast<std::uint64_t>(u)));
    }

    channels_.reserve(static_cast<std::size_t>(cfg_.num_channels));
    primary_rng_.reserve(static_cast<std::size_t>(cfg_.num_channels));
    for (int c = 0; c < cfg_.num_channels; ++c) {
      Channel ch;
      ch.index = c;
      ch.frequency_hz = cfg_.base_frequency_hz + cfg_.channel_spacing_hz * c;
      primary_rng_.push_back(detail::make_stream(seed, detail::kPrimaryStreamBase + static_cast<std::uint64_t>(c)));
      auto& prng = primary_rng_.back();
      switch (cfg_.primary_mode) {
        case PrimaryMode::always_on:
          ch.primary_active = true;
          break;
        case PrimaryMode::absent:
          break;
        case PrimaryMode::dynamic: {
          const double p_on = cfg_.primary_on_rate / (cfg_.primary_on_rate + cfg_.primary_off_rate);
          ch.primary_active = detail::uniform(prng, 0.0, 1.0) < p_on;
          const double rate = ch.primary_active ? cfg_.primary_off_rate : cfg_.primary_on_rate;
          schedule(detail::exponential(prng, rate), EventKind::primary_toggle, 0, c);
          break;
        }
      }
      channels_.push_back(ch);
    }
    schedule(detail::exponential(arrival_rng_, rate_), EventKind::arrival, 0, -1);
    sample(0.0);
  }

  void set_observer(Observer obs) { observer_ = std::move(obs); }
  void record_decisions(bool on) { record_decisions_ = on; }

  double clock() const noexcept { return clock_; }
  Policy policy() const noexcept { return policy_; }
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const PrimaryUser& primary_user() const noexcept { return pu_; }
  std::size_t pending_count() const noexcept { return pending_.size(); }
  std::uint64_t events_processed() const noexcept { return events_; }
  const std::vector<DecisionRecord>& decisions() const noexcept { return decisions_; }
  bool finished() const noexcept { return finished_; }

  int free_count() const noexcept {
    return static_cast<int>(std::count_if(channels_.begin(), channels_.end(), [](const Channel& c) { return c.is_free(); }));
  }
  int allocated_count() const noexcept {
    return static_cast<int>(
        std::count_if(channels_.begin(), channels_.end(), [](const Channel& c) { return c.occupant.has_value(); }));
  }
  int primary_count() const noexcept {
    return static_cast<int>(
        std::count_if(channels_.begin(), channels_.end(), [](const Channel& c) { return c.primary_active; }));
  }

  /// Throws std::logic_error if any state invariant is broken.
  void check_invariants() const {
    if (free_count() + allocated_count() + primary_count() != cfg_.num_channels) {
      throw std::logic_error("channel conservation violated at t=" + std::to_string(clock_));
    }
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      const auto& ch = channels_[i];
      if (ch.primary_active && ch.occupant) {
        throw std::logic_error("secondary occupies an active primary channel at t=" + std::to_string(clock_));
      }
      if (i > 0 && !(ch.frequency_hz > channels_[i - 1].frequency_hz)) {
        throw std::logic_error("channel frequencies not strictly increasing");
      }
    }
    if (static_cast<std::size_t>(allocated_count()) != active_.size()) {
      throw std::logic_error("active call table out of sync with channels");
    }
    if (free_.integral() < 0.0 || allocated_.integral() < 0.0 || primary_.integral() < 0.0 || spread_.integral() < 0.0) {
      throw std::logic_error("negative accumulator");
    }
    if (policy_ == Policy::fls && !pending_.empty() && free_count() > 0) {
      throw std::logic_error("free channel left idle while requests are pending");
    }
  }

  /// Processes one event. Returns false once the horizon is reached.
  bool step() {
    if (finished_) return false;
    if (queue_.empty() || queue_.top().time > cfg_.sim_duration) {
      finished_ = true;
      clock_ = cfg_.sim_duration;
      return false;
    }
    const Event ev = queue_.top();
    queue_.pop();
    if (ev.time < clock_) throw std::logic_error("event time went backwards");
    clock_ = ev.time;
    switch (ev.kind) {
      case EventKind::arrival:
        on_arrival();
        break;
      case EventKind::departure:
        on_departure(ev.ref);
        break;
      case EventKind::primary_toggle:
        on_primary_toggle(ev.channel);
        break;
      case EventKind::patience:
        on_patience(ev.ref);
        break;
    }
    ++events_;
    sample(clock_);
    if (observer_) observer_(*this);
    return true;
  }

  MetricsRow run() {
    while (step()) {
    }
    return metrics();
  }

  /// Metrics over the observation window [warm-up, horizon].
  MetricsRow metrics() const {
    const double t_end = cfg_.sim_duration;
    MetricsRow m;
    m.arrival_rate = rate_;
    m.policy = policy_;
    const double decided = granted_ + blocked_;
    m.blocking_probability = decided > 0 ? blocked_ / decided : 0.0;
    m.mean_free_spectrum = free_.mean(t_end);
    m.mean_allocated_spectrum = allocated_.mean(t_end);
    m.mean_primary_occupied = primary_.mean(t_end);
    m.interference_spread = spread_.mean(t_end);
    m.system_efficiency = system_efficiency(m.mean_allocated_spectrum, rate_ * cfg_.mean_holding_time);
    m.channel_utilization = channel_utilization(allocated_, cfg_.num_channels, t_end);
    m.arrivals = arrivals_;
    m.blocked = blocked_;
    m.dropped = dropped_;
    return m;
  }

  /// Descriptors of the given users at the current clock.
  std::vector<DescriptorVector> descriptors(std::span<const int> user_ids) {
    std::vector<double> dist;
    dist.reserve(users_.size());
    for (auto& u : users_) {
      u.advance_to(clock_);
      dist.push_back(euclidean_distance(u.state(), pu_));
    }
    const auto norm = normalize_distances(dist);
    std::vector<DescriptorVector> out;
    out.reserve(user_ids.size());
    for (int id : user_ids) {
      auto& u = users_[static_cast<std::size_t>(id)];
      out.push_back({u.utilization_efficiency(clock_, cfg_.efficiency_window),
                     mobility_degree(u.state().speed, cfg_.max_speed), norm[static_cast<std::size_t>(id)]});
    }
    return out;
  }

 private:
  enum class EventKind { arrival, departure, primary_toggle, patience };

  struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    std::uint64_t ref;
    int channel;

    bool operator>(const Event& o) const noexcept { return time != o.time ? time > o.time : seq > o.seq; }
  };

  struct Request {
    std::uint64_t id;
    int user;
    double arrival_time;
    double holding_time;
    bool counted;
  };

  void schedule(double t, EventKind kind, std::uint64_t ref, int channel) {
    queue_.push(Event{t, next_seq_++, kind, ref, channel});
  }

  void sample(double t) {
    free_.set(t, free_count());
    allocated_.set(t, allocated_count());
    primary_.set(t, primary_count());
    spread_.set(t, interference_spread(channels_));
  }

  void on_arrival() {
    const int user = std::uniform_int_distribution<int>(0, cfg_.num_secondary_users - 1)(arrival_rng_);
    const double holding = detail::exponential(arrival_rng_, 1.0 / cfg_.mean_holding_time);
    schedule(clock_ + detail::exponential(arrival_rng_, rate_), EventKind::arrival, 0, -1);

    const Request req{next_request_++, user, clock_, holding, clock_ >= warmup_end_};
    if (req.counted) ++arrivals_;

    if (policy_ == Policy::nsu) {
      const auto d = nsu_admit(channels_);
      if (d.channel) {
        grant(req, *d.channel);
      } else {
        block(req);
      }
      return;
    }

    pending_.push_back(req);
    schedule(clock_ + cfg_.mean_holding_time, EventKind::patience, req.id, -1);
    serve_pending();
  }

  void on_departure(std::uint64_t call) {
    auto it = active_.find(call);
    if (it == active_.end()) return;  // dropped earlier
    auto& ch = channels_[static_cast<std::size_t>(it->second)];
    ch.occupant.reset();
    ch.call = 0;
    active_.erase(it);
    serve_pending();
  }

  void on_primary_toggle(int c) {
    auto& ch = channels_[static_cast<std::size_t>(c)];
    auto& prng = primary_rng_[static_cast<std::size_t>(c)];
    if (!ch.primary_active) {
      if (ch.occupant) {
        // Spectrum handoff, else the call is dropped.
        const std::uint64_t call = ch.call;
        const int user = *ch.occupant;
        ch.occupant.reset();
        ch.call = 0;
        if (auto target = lowest_free_channel(channels_, c)) {
          auto& dst = channels_[static_cast<std::size_t>(*target)];
          dst.occupant = user;
          dst.call = call;
          active_[call] = *target;
        } else {
          active_.erase(call);
          ++dropped_;
        }
      }
      ch.primary_active = true;
      schedule(clock_ + detail::exponential(prng, cfg_.primary_off_rate), EventKind::primary_toggle, 0, c);
    } else {
      ch.primary_active = false;
      schedule(clock_ + detail::exponential(prng, cfg_.primary_on_rate), EventKind::primary_toggle, 0, c);
      serve_pending();
    }
  }

  void on_patience(std::uint64_t request) {
    auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Request& r) { return r.id == request; });
    if (it == pending_.end()) return;
    const Request req = *it;
    pending_.erase(it);
    block(req);
  }

  /// Hands free channels to pending requests, highest possibility first.
  void serve_pending() {
    while (!pending_.empty()) {
      if (!lowest_free_channel(channels_)) return;
      std::vector<int> ids;
      ids.reserve(pending_.size());
      for (const auto& r : pending_) ids.push_back(r.user);
      AdmissionDecision d;
      if (pending_.size() == 1) {
        d = AdmissionDecision{lowest_free_channel(channels_), 0, {}};
      } else {
        const auto desc = descriptors(ids);
        d = fls_admit(engine_, channels_, desc);
        if (record_decisions_) {
          DecisionRecord rec;
          rec.time = clock_;
          rec.users = ids;
          rec.descriptors = desc;
          rec.possibilities = d.possibilities;
          for (int id : ids) {
            const auto& su = users_[static_cast<std::size_t>(id)].state();
            rec.doppler_hz.push_back(doppler_shift(su.speed, su.heading, pu_.carrier_frequency_hz,
                                                   cfg_.path_loss.wave_speed));
          }
          rec.winner = d.winner;
          rec.channel = *d.channel;
          decisions_.push_back(std::move(rec));
        }
      }
      const Request req = pending_[d.winner];
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(d.winner));
      grant(req, *d.channel);
    }
    if (policy_ == Policy::fls && cfg_.fls_repack) repack();
  }

  /// Moves the highest-index occupant down into the lowest free channel
  /// until occupied channels form a prefix of the non-primary ones.
  void repack() {
    for (;;) {
      const auto low = lowest_free_channel(channels_);
      if (!low) return;
      int high = -1;
      for (int c = cfg_.num_channels - 1; c > *low; --c) {
        if (channels_[static_cast<std::size_t>(c)].occupant) {
          high = c;
          break;
        }
      }
      if (high < 0) return;
      auto& src = channels_[static_cast<std::size_t>(high)];
      auto& dst = channels_[static_cast<std::size_t>(*low)];
      dst.occupant = src.occupant;
      dst.call = src.call;
      active_[src.call] = *low;
      src.occupant.reset();
      src.call = 0;
    }
  }

  void grant(const Request& req, int c) {
    auto& ch = channels_[static_cast<std::size_t>(c)];
    ch.occupant = req.user;
    ch.call = req.id;
    active_[req.id] = c;
    schedule(clock_ + req.holding_time, EventKind::departure, req.id, c);
    if (req.counted) ++granted_;
    users_[static_cast<std::size_t>(req.user)].record_outcome(clock_, true);
  }

  void block(const Request& req) {
    if (req.counted) ++blocked_;
    users_[static_cast<std::size_t>(req.user)].record_outcome(clock_, false);
  }

  SimConfig cfg_;
  const FlsEngine& engine_;
  double rate_;
  Policy policy_;
  double warmup_end_;

  std::mt19937_64 arrival_rng_;
  std::vector<std::mt19937_64> primary_rng_;
  PrimaryUser pu_;
  std::vector<MobileUser> users_;
  std::vector<Channel> channels_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_request_ = 1;
  std::deque<Request> pending_;
  std::map<std::uint64_t, int> active_;  // call id -> channel

  double clock_ = 0.0;
  std::uint64_t events_ = 0;
  bool finished_ = false;
  Observer observer_;
  bool record_decisions_ = false;
  std::vector<DecisionRecord> decisions_;

  TimeWeightedMean free_;
  TimeWeightedMean allocated_;
  TimeWeightedMean primary_;
  TimeWeightedMean spread_;
  double arrivals_ = 0.0;
  double granted_ = 0.0;
  double blocked_ = 0.0;
  double dropped_ = 0.0;
};

inline MetricsRow run_replication(const SimConfig& config, const FlsEngine& engine, double arrival_rate, Policy policy,
                                  std::uint64_t seed) {
  Simulator sim(config, engine, arrival_rate, policy, seed);
  return sim.run();
}

/// Field-wise mean of replication rows. Rows are reduced in the given order.
inline MetricsRow average(std::span<const MetricsRow> rows) {
  if (rows.empty()) throw DomainError("cannot average zero replications");
  MetricsRow m;
  m.arrival_rate = rows.front().arrival_rate;
  m.policy = rows.front().policy;
  for (const auto& r : rows) {
    m.blocking_probability += r.blocking_probability;
    m.mean_free_spectrum += r.mean_free_spectrum;
    m.mean_allocated_spectrum += r.mean_allocated_spectrum;
    m.interference_spread += r.interference_spread;
    m.system_efficiency += r.system_efficiency;
    m.channel_utilization += r.channel_utilization;
    m.mean_primary_occupied += r.mean_primary_occupied;
    m.arrivals += r.arrivals;
    m.blocked += r.blocked;
    m.dropped += r.dropped;
  }
  const double n = static_cast<double>(rows.size());
  m.blocking_probability /= n;
  m.mean_free_spectrum /= n;
  m.mean_allocated_spectrum /= n;
  m.interference_spread /= n;
  m.system_efficiency /= n;
  m.channel_utilization /= n;
  m.mean_primary_occupied /= n;
  return m;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Per-replication rows for one (rate, policy); replication k uses seed base+k.
inline std::vector<MetricsRow> run_replications(const SimConfig& config, const FlsEngine& engine, double arrival_rate,
                                                Policy policy, unsigned threads = 0) {
  config.validate();
  std::vector<MetricsRow> rows(static_cast<std::size_t>(config.replications));
  parallel_for(rows.size(), threads, [&](std::size_t k) {
    rows[k] = run_replication(config, engine, arrival_rate, policy, config.rng_seed + k);
  });
  return rows;
}

struct SweepPoint {
  double arrival_rate = 0.0;
  std::optional<MetricsRow> fls;
  std::optional<MetricsRow> nsu;
};

/// Replication-averaged rows for every arrival rate. Both policies at
/// replication k share seed base+k, so they see the same traffic.
inline std::vector<SweepPoint> run_sweep(const SimConfig& config, const FlsEngine& engine,
                                         std::span<const Policy> policies = std::array{Policy::fls, Policy::nsu},
                                         unsigned threads = 0) {
  config.validate();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t per_rate = reps * policies.size();
  std::vector<MetricsRow> rows(config.arrival_rates.size() * per_rate);
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const std::size_t rate_idx = i / per_rate;
    const std::size_t policy_idx = (i % per_rate) / reps;
    const std::size_t k = i % reps;
    rows[i] = run_replication(config, engine, config.arrival_rates[rate_idx], policies[policy_idx],
                              config.rng_seed + k);
  });

  std::vector<SweepPoint> out;
  out.reserve(config.arrival_rates.size());
  for (std::size_t r = 0; r < config.arrival_rates.size(); ++r) {
    SweepPoint pt;
    pt.arrival_rate = config.arrival_rates[r];
    for (std::size_t p = 0; p < policies.size(); ++p) {
      const auto avg = average(std::span(rows).subspan(r * per_rate + p * reps, reps));
      (policies[p] == Policy::fls ? pt.fls : pt.nsu) = avg;
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace osa

#endif  // OSA_SIMULATOR_HPP
