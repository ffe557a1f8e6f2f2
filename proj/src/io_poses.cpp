// SPDX-License-Identifier: Apache-2.0
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "io_util.hpp"
#include "p2p/io.hpp"

namespace p2p {

// One frame per line:
//   <frame_id> <n_persons> { p <score> { <valid> <x> <y> <z> } x14 } x persons
// Coordinates are meters with six significant digits, formatted identically
// on every run.
void save_pose_records(const std::vector<FramePoses>& frames, const std::string& path) {
    io::File f = io::open_write(path);
    for (const FramePoses& fr : frames) {
        std::fprintf(f.get(), "%" PRId64 " %zu", fr.frame_id, fr.persons.size());
        for (const Skeleton3D& s : fr.persons) {
            std::fprintf(f.get(), " p %.6g", s.score);
            for (int j = 0; j < kNumJoints; ++j) {
                const Joint3D& jt = s.joints[j];
                std::fprintf(f.get(), " %d %.6g %.6g %.6g", jt.valid ? 1 : 0, jt.xyz.x, jt.xyz.y,
                             jt.xyz.z);
            }
        }
        std::fprintf(f.get(), "\n");
    }
}

std::vector<FramePoses> load_pose_records(const std::string& path) {
    io::File f = io::open_read(path);
    std::vector<FramePoses> frames;
    char* line = nullptr;
    size_t cap = 0;
    ssize_t len;
    int line_no = 0;
    while ((len = getline(&line, &cap, f.get())) != -1) {
        ++line_no;
        std::istringstream is(std::string(line, static_cast<size_t>(len)));
        FramePoses fr;
        size_t n_persons = 0;
        if (!(is >> fr.frame_id >> n_persons)) {
            free(line);
            throw FormatError("pose records: malformed line " + std::to_string(line_no) + " in " +
                              path);
        }
        fr.persons.resize(n_persons);
        for (Skeleton3D& s : fr.persons) {
            std::string tag;
            if (!(is >> tag >> s.score) || tag != "p") {
                free(line);
                throw FormatError("pose records: bad person block at line " +
                                  std::to_string(line_no) + " in " + path);
            }
            for (int j = 0; j < kNumJoints; ++j) {
                int valid;
                if (!(is >> valid >> s.joints[j].xyz.x >> s.joints[j].xyz.y >> s.joints[j].xyz.z)) {
                    free(line);
                    throw FormatError("pose records: truncated joints at line " +
                                      std::to_string(line_no) + " in " + path);
                }
                s.joints[j].valid = valid != 0;
            }
        }
        frames.push_back(std::move(fr));
    }
    free(line);
    return frames;
}

void save_loss_log(const std::vector<EpochLog>& log, const std::string& path) {
    io::File f = io::open_write(path);
    for (const EpochLog& e : log) {
        std::fprintf(f.get(), "%d %.9g %.9g\n", e.epoch, e.train_loss, e.val_loss);
    }
}

}  // namespace p2p
