#include "socsim/inference/templates.hpp"

#include "socsim/core/error.hpp"

namespace socsim::inference {

using core::Errc;
using core::raise;

void TemplateStore::set(const std::string& id, std::string text) {
    templates_[id] = std::move(text);
}

bool TemplateStore::has(const std::string& id) const {
    return templates_.count(id) != 0;
}

const std::string& TemplateStore::text(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) {
        raise(Errc::TemplateError, "unknown template '" + id + "'");
    }
    return it->second;
}

std::string TemplateStore::substitute(const std::string& text,
                                      const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                out.push_back('{');
                ++i;
                continue;
            }
            const std::size_t close = text.find('}', i + 1);
            if (close == std::string::npos) {
                raise(Errc::TemplateError, "unterminated placeholder");
            }
            const std::string name = text.substr(i + 1, close - i - 1);
            auto it = vars.find(name);
            if (it == vars.end()) {
                raise(Errc::TemplateError, "unresolved placeholder '" + name + "'");
            }
            out += it->second;
            i = close;
        } else if (c == '}') {
            if (i + 1 < text.size() && text[i + 1] == '}') {
                out.push_back('}');
                ++i;
                continue;
            }
            raise(Errc::TemplateError, "stray '}' outside placeholder");
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string TemplateStore::render(const std::string& id,
                                  const std::map<std::string, std::string>& vars) const {
    return substitute(text(id), vars);
}

} // namespace socsim::inference
