#include "droidmark/susi_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace droidmark {

const std::vector<std::string> &source_categories() {
    static const std::vector<std::string> rows = {
        "LOCATION_INFORMATION",
        "NETWORK_INFORMATION",
        "FILE_INFORMATION",
        "BLUETOOTH_INFORMATION",
        "EMAIL",
        "UNIQUE_IDENTIFIER",
        "ACCOUNT_INFORMATION",
        "SYNCHRONIZATION_DATA",
        "SMS_MMS",
        "SYSTEM_SETTING",
        "CONTACT_INFORMATION",
        "CALENDAR_INFORMATION",
        "IMAGE",
        "BROWSER_INFORMATION",
        "NFC",
        "DATABASE_INFORMATION",
        "NO_CATEGORY",
    };
    return rows;
}

const std::vector<std::string> &sink_categories() {
    // Rows 2 and 16 repeat earlier names; they are kept as printed.
    static const std::vector<std::string> rows = {
        "PHONE_CONNECTION",
        "PHONE_CONNECTION",
        "EMAIL",
        "BLUETOOTH",
        "AUDIO",
        "LOCATTON_INFORMATION",
        "PHONE_STATE",
        "SYNCHRONIZATION_DATA",
        "NETWORK",
        "SMS_MMS",
        "FILE",
        "LOG",
        "CONTACT_INFORMATION",
        "CALENDAR_INFORMATION",
        "SYSTEM_SETTING",
        "SYNCHRONIZATION_DATA",
        "NFC",
        "BROWSER_INFORMATION",
        "NO_CATEGORY",
    };
    return rows;
}

static int first_index(const std::vector<std::string> &rows, const std::string &raw) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] == raw) return static_cast<int>(i);
    }
    return -1;
}

bool is_source_category(const std::string &raw) {
    return first_index(source_categories(), raw) >= 0;
}

bool is_sink_category(const std::string &raw) {
    return first_index(sink_categories(), raw) >= 0;
}

int source_category_index(const std::string &raw) {
    return first_index(source_categories(), raw);
}

int sink_category_index(const std::string &raw) {
    return first_index(sink_categories(), raw);
}

std::string normalized_category(const std::string &raw) {
    if (raw == "LOCATTON_INFORMATION") return "LOCATION_INFORMATION";
    return raw;
}

void SourceSinkCatalog::add(const CatalogEntry &entry) {
    if (entry.role == Role::Source) {
        if (!is_source_category(entry.category)) throw UnknownCategory(entry.category);
        if (sources_.count(entry.api_signature))
            throw DuplicateEntry(entry.api_signature, Role::Source);
        sources_[entry.api_signature] = entry.category;
    } else {
        if (!is_sink_category(entry.category)) throw UnknownCategory(entry.category);
        if (sinks_.count(entry.api_signature))
            throw DuplicateEntry(entry.api_signature, Role::Sink);
        sinks_[entry.api_signature] = entry.category;
    }
}

Classification SourceSinkCatalog::classify(const std::string &api_signature) const {
    Classification c;
    if (auto it = sources_.find(api_signature); it != sources_.end())
        c.source_category = it->second;
    if (auto it = sinks_.find(api_signature); it != sinks_.end())
        c.sink_category = it->second;
    return c;
}

static std::string trim(const std::string &s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

SourceSinkCatalog parse_catalog(const std::string &text) {
    SourceSinkCatalog catalog;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;

        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw MalformedLine(line_no, "expected signature<TAB>ROLE<TAB>CATEGORY");

        std::string sig = trim(line.substr(0, t1));
        std::string role_str = trim(line.substr(t1 + 1, t2 - t1 - 1));
        std::string category = trim(line.substr(t2 + 1));
        if (sig.empty() || category.empty())
            throw MalformedLine(line_no, "empty field");

        Role role;
        if (role_str == "SOURCE") {
            role = Role::Source;
        } else if (role_str == "SINK") {
            role = Role::Sink;
        } else {
            throw MalformedLine(line_no, "role must be SOURCE or SINK, got '" + role_str + "'");
        }
        catalog.add({sig, role, category});
    }
    return catalog;
}

SourceSinkCatalog load_catalog(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open catalog file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_catalog(buf.str());
}

std::string emit_catalog(const SourceSinkCatalog &catalog) {
    std::ostringstream out;
    for (const auto &[sig, cat] : catalog.sources()) out << sig << "\tSOURCE\t" << cat << "\n";
    for (const auto &[sig, cat] : catalog.sinks()) out << sig << "\tSINK\t" << cat << "\n";
    return out.str();
}

std::string builtin_catalog_text() {
    return
        "# Default source/sink catalog. One entry per line:\n"
        "# signature<TAB>SOURCE|SINK<TAB>CATEGORY\n"
        "android.location.LocationManager.getLastKnownLocation\tSOURCE\tLOCATION_INFORMATION\n"
        "android.net.wifi.WifiInfo.getSSID\tSOURCE\tNETWORK_INFORMATION\n"
        "java.io.FileInputStream.read\tSOURCE\tFILE_INFORMATION\n"
        "android.bluetooth.BluetoothAdapter.getAddress\tSOURCE\tBLUETOOTH_INFORMATION\n"
        "javax.mail.Message.getContent\tSOURCE\tEMAIL\n"
        "android.telephony.TelephonyManager.getDeviceId\tSOURCE\tUNIQUE_IDENTIFIER\n"
        "android.telephony.TelephonyManager.getSubscriberId\tSOURCE\tUNIQUE_IDENTIFIER\n"
        "android.telephony.TelephonyManager.getSimSerialNumber\tSOURCE\tUNIQUE_IDENTIFIER\n"
        "android.accounts.AccountManager.getAccounts\tSOURCE\tACCOUNT_INFORMATION\n"
        "android.content.ContentResolver.isSyncActive\tSOURCE\tSYNCHRONIZATION_DATA\n"
        "android.telephony.SmsMessage.getMessageBody\tSOURCE\tSMS_MMS\n"
        "android.telephony.SmsMessage.getOriginatingAddress\tSOURCE\tSMS_MMS\n"
        "android.provider.Settings.Secure.getString\tSOURCE\tSYSTEM_SETTING\n"
        "android.content.ContentResolver.query\tSOURCE\tCONTACT_INFORMATION\n"
        "android.provider.CalendarContract.Instances.query\tSOURCE\tCALENDAR_INFORMATION\n"
        "android.hardware.Camera.takePicture\tSOURCE\tIMAGE\n"
        "android.provider.Browser.getAllBookmarks\tSOURCE\tBROWSER_INFORMATION\n"
        "android.nfc.NdefMessage.toByteArray\tSOURCE\tNFC\n"
        "android.database.sqlite.SQLiteDatabase.rawQuery\tSOURCE\tDATABASE_INFORMATION\n"
        "java.util.Locale.getCountry\tSOURCE\tNO_CATEGORY\n"
        "android.telecom.TelecomManager.placeCall\tSINK\tPHONE_CONNECTION\n"
        "javax.mail.Transport.send\tSINK\tEMAIL\n"
        "android.bluetooth.BluetoothSocket.connect\tSINK\tBLUETOOTH\n"
        "android.media.AudioTrack.write\tSINK\tAUDIO\n"
        "android.location.LocationManager.setTestProviderLocation\tSINK\tLOCATTON_INFORMATION\n"
        "android.telephony.TelephonyManager.setDataEnabled\tSINK\tPHONE_STATE\n"
        "android.content.ContentResolver.requestSync\tSINK\tSYNCHRONIZATION_DATA\n"
        "org.apache.http.impl.client.DefaultHttpClient.execute\tSINK\tNETWORK\n"
        "java.io.OutputStream.write\tSINK\tNETWORK\n"
        "android.telephony.SmsManager.sendTextMessage\tSINK\tSMS_MMS\n"
        "android.telephony.SmsManager.sendMultipartTextMessage\tSINK\tSMS_MMS\n"
        "java.io.FileOutputStream.write\tSINK\tFILE\n"
        "android.util.Log.d\tSINK\tLOG\n"
        "android.util.Log.e\tSINK\tLOG\n"
        "android.content.ContentResolver.insert\tSINK\tCONTACT_INFORMATION\n"
        "android.content.ContentResolver.update\tSINK\tCALENDAR_INFORMATION\n"
        "android.provider.Settings.System.putString\tSINK\tSYSTEM_SETTING\n"
        "android.nfc.NfcAdapter.setNdefPushMessage\tSINK\tNFC\n"
        "android.provider.Browser.addSearchUrl\tSINK\tBROWSER_INFORMATION\n"
        "java.lang.ProcessBuilder.start\tSINK\tNO_CATEGORY\n"
        "android.app.ActivityManager.killBackgroundProcesses\tSINK\tNO_CATEGORY\n";
}

const SourceSinkCatalog &builtin_catalog() {
    static const SourceSinkCatalog catalog = parse_catalog(builtin_catalog_text());
    return catalog;
}

} // namespace droidmark
