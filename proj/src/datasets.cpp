#include "polydina/datasets.hpp"

namespace polydina {

// Transcribed cell-for-cell from the source tables; the dataset tests verify
// the transcription against independently keyed-in arrays plus a checksum.

const std::string& pisa2000_q_csv() {
    static const std::string text =
        "# item,category,q1,q2,q3,q4,q5\n"
        "1,1,1,0,1,0,0\n"
        "2,1,1,0,1,1,0\n"
        "3,1,0,1,1,1,0\n"
        "4,1,1,0,1,0,0\n"
        "5,1,0,1,0,1,1\n"
        "5,2,0,1,0,1,1\n"
        "6,1,1,1,1,0,0\n"
        "7,1,0,1,1,1,0\n"
        "7,2,0,1,1,1,0\n"
        "8,1,0,1,0,0,1\n"
        "9,1,0,1,1,0,0\n"
        "10,1,1,0,1,0,0\n"
        "10,2,1,0,1,0,0\n"
        "11,1,1,0,1,0,0\n"
        "11,2,1,0,1,0,0\n"
        "12,1,0,1,1,1,0\n"
        "13,1,0,1,0,0,1\n"
        "14,1,0,1,0,0,0\n"
        "15,1,1,0,0,0,1\n"
        "16,1,0,1,1,0,0\n"
        "17,1,0,1,1,0,0\n"
        "18,1,0,1,0,1,0\n"
        "19,1,1,0,1,0,0\n"
        "20,1,0,0,1,1,0\n"
        "20,2,0,0,1,1,0\n";
    return text;
}

const std::string& timss2007_q_csv() {
    static const std::string text =
        "# item,category,q1,q2,q3,q4,q5,q6,q7,q8\n"
        "1,1,1,1,0,0,0,0,0,0\n"
        "2,1,0,1,1,0,1,0,0,0\n"
        "3,1,1,0,0,0,0,1,0,1\n"
        "3,2,1,0,0,0,0,1,0,1\n"
        "4,1,0,1,1,0,0,0,0,0\n"
        "5,1,0,1,1,0,0,0,0,0\n"
        "6,1,0,1,0,1,0,0,0,0\n"
        "7,1,0,1,1,0,1,0,0,0\n"
        "7,2,0,0,0,0,0,0,1,0\n"
        "8,1,0,1,1,0,1,0,1,0\n"
        "9,1,0,1,1,1,0,0,0,0\n"
        "9,2,0,1,1,1,0,0,0,0\n"
        "10,1,0,1,1,0,0,0,0,0\n"
        "11,1,1,1,0,0,0,1,0,1\n";
    return text;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

} // namespace polydina
