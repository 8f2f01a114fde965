#pragma once

#include <map>
#include <string>

namespace socsim::inference {

// Prompt templates with {placeholder} substitution. "{{" and "}}" render
// literal braces. Rendering fails on unresolved placeholders.
class TemplateStore {
public:
    void set(const std::string& id, std::string text);
    bool has(const std::string& id) const;
    const std::string& text(const std::string& id) const;
    std::string render(const std::string& id,
                       const std::map<std::string, std::string>& vars) const;
    static std::string substitute(const std::string& text,
                                  const std::map<std::string, std::string>& vars);

private:
    std::map<std::string, std::string> templates_;
};

} // namespace socsim::inference
