#include "droidmark/event_sim.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "droidmark/rng.hpp"

namespace droidmark {

const std::vector<std::string> &monitored_signals() {
    static const std::vector<std::string> names = {
        "BootReceiver",
        "SMSReceiver",
        "AlarmReceiver",
        "android.telephony.SmsManager",
    };
    return names;
}

const std::vector<std::string> &canonical_processes() {
    static const std::vector<std::string> names = {
        "com.samsung.ui",
        "datapole.rathi.monitor",
        "com.elite.AlarmReceiver",
        "com.elite.SMSReceiver",
        "com.android.bluetooth",
        "android.telephony.SMSManager",
        "com.sec.imsservice",
        "com.elite.BootReceiver",
    };
    return names;
}

const std::vector<std::string> &instance_attributes() {
    static const std::vector<std::string> names = {
        "ProcessName",
        "BootReceiver",
        "SMSReceiver",
        "AlarmReceiver",
        "android.telephony.SmsManager",
        "ScreenWake",
        "Class",
    };
    return names;
}

namespace {

std::string trim(const std::string &s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::vector<EventRecord> parse_trace(const std::string &text) {
    std::vector<EventRecord> events;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::int64_t last_ts = 0;
    bool have_ts = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> fields = split(t, ',');
        if (fields.size() != 4)
            throw MalformedTrace(line_no, "expected timestamp,process,signals,screen_wake");

        EventRecord ev;
        try {
            std::size_t used = 0;
            ev.timestamp_ms = std::stoll(trim(fields[0]), &used);
            if (used != trim(fields[0]).size()) throw std::invalid_argument("trailing");
        } catch (const std::exception &) {
            throw MalformedTrace(line_no, "bad timestamp '" + fields[0] + "'");
        }
        if (ev.timestamp_ms < 0) throw MalformedTrace(line_no, "negative timestamp");
        if (have_ts && ev.timestamp_ms < last_ts) throw NonMonotonicTimestamps(line_no);
        last_ts = ev.timestamp_ms;
        have_ts = true;

        ev.process = trim(fields[1]);
        if (ev.process.empty()) throw MalformedTrace(line_no, "empty process name");

        std::string signals = trim(fields[2]);
        if (!signals.empty()) {
            for (const auto &raw : split(signals, ';')) {
                std::string sig = trim(raw);
                if (sig == "BootReceiver") ev.boot_receiver = 1;
                else if (sig == "SMSReceiver") ev.sms_receiver = 1;
                else if (sig == "AlarmReceiver") ev.alarm_receiver = 1;
                else if (sig == "android.telephony.SmsManager") ev.sms_manager = 1;
                else throw MalformedTrace(line_no, "unknown signal '" + sig + "'");
            }
        }

        std::string wake = trim(fields[3]);
        if (wake == "0") ev.screen_wake = 0;
        else if (wake == "1") ev.screen_wake = 1;
        else throw MalformedTrace(line_no, "screen_wake must be 0 or 1");

        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<MonitorInstance> replay_trace(const std::string &trace_text,
                                          const SuspectList &suspects,
                                          std::int64_t window_ms) {
    if (window_ms <= 0) throw Error("window_ms must be positive");
    std::set<std::string> watched(suspects.begin(), suspects.end());

    struct Bucket {
        MonitorInstance inst;
        int wake_votes = 0;
        int events = 0;
    };
    std::map<std::pair<std::int64_t, std::string>, Bucket> buckets;

    for (const auto &ev : parse_trace(trace_text)) {
        if (!watched.count(ev.process)) continue; // monitor only the suspects
        auto key = std::make_pair(ev.timestamp_ms / window_ms, ev.process);
        Bucket &b = buckets[key];
        b.inst.process = ev.process;
        b.inst.boot_receiver |= ev.boot_receiver;
        b.inst.sms_receiver |= ev.sms_receiver;
        b.inst.alarm_receiver |= ev.alarm_receiver;
        b.inst.sms_manager |= ev.sms_manager;
        b.wake_votes += ev.screen_wake;
        b.events += 1;
    }

    std::vector<MonitorInstance> out;
    out.reserve(buckets.size());
    for (auto &[key, b] : buckets) {
        // majority wake state, ties resolved awake
        b.inst.screen_wake = 2 * b.wake_votes >= b.events ? 1 : 0;
        b.inst.label = InstanceLabel::Unknown;
        out.push_back(b.inst);
    }
    return out;
}

InstanceLabel label_instance(const MonitorInstance &inst) {
    if (inst.sms_manager == 1 && inst.screen_wake == 0) return InstanceLabel::Malicious;
    return InstanceLabel::Regular;
}

Dataset generate_dataset(std::uint64_t seed, int n) {
    if (n < 2) throw Error("generate_dataset needs n >= 2");
    Rng rng(seed);
    int malicious = n / 2;

    std::vector<MonitorInstance> instances;
    instances.reserve(n);
    for (int i = 0; i < n; ++i) {
        MonitorInstance inst;
        inst.process = canonical_processes()[rng.below(canonical_processes().size())];
        inst.boot_receiver = static_cast<int>(rng.below(2));
        inst.sms_receiver = static_cast<int>(rng.below(2));
        inst.alarm_receiver = static_cast<int>(rng.below(2));
        if (i < malicious) {
            inst.sms_manager = 1;
            inst.screen_wake = 0;
        } else {
            // any pattern except the malicious one
            switch (rng.below(3)) {
            case 0: inst.sms_manager = 0; inst.screen_wake = 0; break;
            case 1: inst.sms_manager = 0; inst.screen_wake = 1; break;
            default: inst.sms_manager = 1; inst.screen_wake = 1; break;
            }
        }
        instances.push_back(inst);
    }
    rng.shuffle(instances);
    for (auto &inst : instances) inst.label = label_instance(inst);
    return instances_to_dataset(instances, canonical_processes());
}

Dataset instances_to_dataset(const std::vector<MonitorInstance> &instances,
                             std::vector<std::string> process_domain) {
    if (process_domain.empty()) {
        std::set<std::string> observed;
        for (const auto &inst : instances) observed.insert(inst.process);
        bool all_canonical = std::all_of(observed.begin(), observed.end(), [](const auto &p) {
            return std::find(canonical_processes().begin(), canonical_processes().end(), p) !=
                   canonical_processes().end();
        });
        if (all_canonical)
            process_domain = canonical_processes();
        else
            process_domain.assign(observed.begin(), observed.end());
    }

    Dataset ds;
    ds.relation = "RunningProcessVectors";
    ds.attributes.push_back({"ProcessName", process_domain});
    for (std::size_t i = 0; i < monitored_signals().size(); ++i) {
        ds.attributes.push_back({monitored_signals()[i], {"0", "1"}});
    }
    ds.attributes.push_back({"ScreenWake", {"0", "1"}});
    ds.attributes.push_back({"Class", {"Regular", "Malicious"}});

    for (const auto &inst : instances) {
        int p = ds.attributes[0].value_index(inst.process);
        if (p < 0) throw Error("process '" + inst.process + "' not in the ProcessName domain");
        std::vector<int> row = {
            p,
            inst.boot_receiver,
            inst.sms_receiver,
            inst.alarm_receiver,
            inst.sms_manager,
            inst.screen_wake,
            inst.label == InstanceLabel::Unknown
                ? kUnknownValue
                : (inst.label == InstanceLabel::Regular ? 0 : 1),
        };
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

std::vector<MonitorInstance> instances_from_dataset(const Dataset &ds) {
    if (ds.attributes.size() != instance_attributes().size())
        throw Error("dataset does not have the 7 monitoring attributes");
    std::vector<MonitorInstance> out;
    for (const auto &row : ds.rows) {
        MonitorInstance inst;
        if (row[0] == kUnknownValue) throw Error("ProcessName may not be unknown");
        inst.process = ds.attributes[0].values[row[0]];
        auto bit = [&](int col) {
            if (row[col] == kUnknownValue) throw Error("signal bits may not be unknown");
            return row[col];
        };
        inst.boot_receiver = bit(1);
        inst.sms_receiver = bit(2);
        inst.alarm_receiver = bit(3);
        inst.sms_manager = bit(4);
        inst.screen_wake = bit(5);
        if (row[6] == kUnknownValue) inst.label = InstanceLabel::Unknown;
        else inst.label = row[6] == 0 ? InstanceLabel::Regular : InstanceLabel::Malicious;
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace droidmark
