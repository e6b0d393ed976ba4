#pragma once

#include <string>
#include <vector>

#include "hake/annotation.hpp"
#include "hake/knowledge.hpp"

namespace hake {

// JSON-lines codecs. Encoding is canonical (sorted sets, fixed key order)
// so encode -> decode -> encode is byte stable.

std::string encode_person(const PersonInstance& instance);
PersonInstance decode_person(const std::string& json_line);

std::vector<PersonInstance> load_person_jsonl(const std::string& path);
void save_person_jsonl(const std::vector<PersonInstance>& instances, const std::string& path);

std::string encode_round(const AnnotationRound& round);
AnnotationRound decode_round(const std::string& json_line);

std::vector<AnnotationRound> load_round_jsonl(const std::string& path);
void save_round_jsonl(const std::vector<AnnotationRound>& rounds, const std::string& path);

}  // namespace hake
